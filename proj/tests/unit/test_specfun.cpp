#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "stratrt/error.hpp"
#include "stratrt/frequency_grid.hpp"
#include "stratrt/specfun.hpp"

using namespace stratrt;

// Reference values computed with mpmath at 30 digits.
struct ExpintCase {
  int n;
  double x;
  double value;
};

class ExpintOracle : public ::testing::TestWithParam<ExpintCase> {};

TEST_P(ExpintOracle, MatchesHighPrecisionValue) {
  const auto c = GetParam();
  EXPECT_NEAR(expint(c.n, c.x) / c.value, 1.0, 1e-13) << "n=" << c.n << " x=" << c.x;
}

INSTANTIATE_TEST_SUITE_P(
    Mpmath, ExpintOracle,
    ::testing::Values(ExpintCase{1, 0.5, 0.55977359477616081}, ExpintCase{2, 0.5, 0.32664386232455302},
                      ExpintCase{3, 2.0, 0.030133379797815893}, ExpintCase{5, 10.0, 3.0897289142536863e-6},
                      ExpintCase{1, 1e-6, 13.238295893062491}, ExpintCase{4, 0.03, 0.31876186764420103},
                      ExpintCase{2, 30.0, 2.9296693677373697e-15}));

TEST(Expint, ValuesAtZero) {
  EXPECT_DOUBLE_EQ(expint(2, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(expint(3, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(expint(5, 0.0), 0.25);
}

TEST(Expint, RecurrenceAcrossSeriesAndFractionBranches) {
  for (int n = 1; n <= 5; ++n) {
    for (double x : {0.999, 1.0, 1.001, 3.7, 49.0}) {
      const double ex = std::exp(-x);
      EXPECT_NEAR((n * expint(n + 1, x) + x * expint(n, x)) / ex, 1.0, 1e-13) << n << " " << x;
    }
  }
}

TEST(Expint, UnderflowsToZero) { EXPECT_EQ(expint(1, 800.0), 0.0); }

TEST(Expint, RejectsBadArguments) {
  EXPECT_THROW(expint(1, 0.0), DomainError);
  EXPECT_THROW(expint(2, -1.0), DomainError);
  EXPECT_THROW(expint(0, 1.0), DomainError);
}

TEST(ExpintSegment, IntegralOfE1OverHalfLine) {
  EXPECT_NEAR(expint_segment(1, 0.0, std::numeric_limits<double>::infinity()), 1.0, 1e-15);
  EXPECT_NEAR(expint_segment(2, 0.5, 2.0), expint(3, 0.5) - expint(3, 2.0), 1e-16);
  EXPECT_THROW(expint_segment(1, 2.0, 1.0), ArgumentError);
}

TEST(Planck, PeakOfFrequencySpectrumIsWienConstant) {
  // d/dx x^3/(e^{x/T}-1) = 0 at x/T = 2.8214393721220789 (root of 3(1-e^-u) = u)
  const double T = 0.75;
  const double u0 = 2.8214393721220789;
  const double h = 1e-4;
  EXPECT_GT(planck(u0 * T, T), planck((u0 - h) * T, T));
  EXPECT_GT(planck(u0 * T, T), planck((u0 + h) * T, T));
}

TEST(Planck, ZeroTemperatureAndDerivative) {
  EXPECT_EQ(planck(1.0, 0.0), 0.0);
  const double T = 0.6, x = 1.3, h = 1e-6;
  const double fd = (planck(x, T + h) - planck(x, T - h)) / (2 * h);
  EXPECT_NEAR(planck_dT(x, T) / fd, 1.0, 1e-8);
  EXPECT_THROW(planck(-1.0, 1.0), DomainError);
  EXPECT_THROW(planck_dT(1.0, 0.0), DomainError);
}

TEST(Stefan, LogGridReproducesScaledConstant) {
  // What remains is the cut-off below x = 0.01, about 0.01^3 / 3 / 6.49.
  const auto g = log_frequency_grid(0.01, 30.0, 200);
  EXPECT_LT(stefan_relative_error(g, 1.0), 6e-8);
  EXPECT_LT(stefan_relative_error(log_frequency_grid(1e-4, 40.0, 400), 1.0), 1e-9);
  EXPECT_NEAR(kScaledStefan, 6.4939394022668291, 1e-14);
}

TEST(PhysicalScales, StoredB0MatchesConstants) {
  const PhysicalScales s;
  EXPECT_NEAR(s.stefan_b0_from_constants() / 1.806657078588539e-8, 1.0, 1e-12);
  EXPECT_NO_THROW(s.validate());
  PhysicalScales typo = s;
  typo.stefan_b0 = 1.806657e-19;
  EXPECT_THROW(typo.validate(), ValidationError);
}

TEST(PhysicalScales, WavelengthConversion) {
  const PhysicalScales s;
  // hc/k = 14.384538595220854 um * 1000 K for the tabulated constants
  EXPECT_NEAR(s.wavelength_um_to_x(10.0), 1.4384538595220854, 1e-12);
  EXPECT_NEAR(s.x_to_wavelength_um(s.wavelength_um_to_x(3.3)), 3.3, 1e-13);
}

TEST(Contraction, DerivedOracle) {
  EXPECT_NEAR(contraction_bound(0.1, 10.0), 0.67335613767544698, 1e-12);
  for (double kz : {1e-3, 1.0, 1e3}) {
    EXPECT_LE(contraction_bound(1.0, kz), 1.0);
    EXPECT_GT(contraction_gap(1.0, kz), 0.0);
  }
  EXPECT_THROW(contraction_bound(0.0, 1.0), DomainError);
}
