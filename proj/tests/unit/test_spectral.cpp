#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "stratrt/error.hpp"
#include "stratrt/specfun.hpp"
#include "stratrt/spectral.hpp"

using namespace stratrt;

namespace {

// Small non-grey slab: kappa varies over the band, optional Rayleigh layer.
Spectrum test_spectrum(std::size_t nodes, double a_ray = 0.0) {
  const FrequencyGrid fg = log_frequency_grid(0.02, 20.0, 40);
  Spectrum s;
  s.x = fg.x;
  s.weights = fg.weights;
  s.depth_nodes = nodes;
  for (double x : s.x) s.kappa.push_back(0.3 + 0.7 * std::exp(-std::pow(std::log(x), 2)));
  s.kappa_max = *std::max_element(s.kappa.begin(), s.kappa.end());
  if (a_ray > 0.0) s.albedo_ray.assign(s.size() * nodes, a_ray);
  return s;
}

SpectralSources lit_from_above(const Spectrum& s, double Q) {
  SpectralSources src = SpectralSources::none(s.size());
  for (std::size_t f = 0; f < s.size(); ++f) {
    src.top[f].kind = SourceKind::directional;
    src.top[f].magnitude = Q * planck(s.x[f], 1.5);
  }
  return src;
}

}  // namespace

TEST(Rayleigh, PhaseIsNormalized) {
  std::vector<double> mu, w;
  gauss_directions(8, mu, w);
  for (double m : {-1.0, -0.4, 0.0, 0.3, 0.9}) {
    double s = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) s += w[k] * rayleigh_phase(m, mu[k]);
    EXPECT_NEAR(0.5 * s, 1.0, 1e-13) << m;
  }
  EXPECT_THROW(rayleigh_phase(1.5, 0.0), ArgumentError);
}

TEST(SpectrumValidation, RejectsBrokenInvariants) {
  Spectrum s = test_spectrum(5);
  EXPECT_NO_THROW(s.validate());
  Spectrum hot = s;
  hot.kappa[3] = 2.0 * s.kappa_max;
  EXPECT_THROW(hot.validate(), ValidationError);
  Spectrum opaque = s;
  opaque.albedo_iso.assign(s.size() * 5, 1.0);
  EXPECT_THROW(opaque.validate(), ValidationError);
  Spectrum unordered = s;
  std::swap(unordered.x[0], unordered.x[1]);
  EXPECT_THROW(unordered.validate(), ValidationError);
}

TEST(SpectralSources, SizeMismatchThrows) {
  const SpectralSources src = SpectralSources::none(3);
  EXPECT_THROW(src.validate(4), ValidationError);
  EXPECT_NO_THROW(src.validate(3));
}

TEST(TemperatureUpdate, InvertsBlackbodyMoments) {
  const Spectrum s = test_spectrum(6);
  const std::vector<double> target = {0.0, 0.1, 0.5, 1.0, 2.5, 7.0};
  RadiationState st = RadiationState::zeros(s.size(), target.size());
  for (std::size_t f = 0; f < s.size(); ++f) {
    for (std::size_t i = 0; i < target.size(); ++i) st.J[f * target.size() + i] = planck(s.x[f], target[i]);
  }
  const auto T = temperature_update(s, st);
  for (std::size_t i = 0; i < target.size(); ++i) EXPECT_NEAR(T[i], target[i], 1e-10 * (1 + target[i]));
}

TEST(MomentsUpdate, FirstSweepIsTheBoundaryTerm) {
  const Spectrum s = test_spectrum(11);
  const SpectralProblem p(s, Grid1D::uniform(2.0, 10), lit_from_above(s, 3.0), 0.2);
  const RadiationState zero = RadiationState::zeros(s.size(), 11);
  const auto next = moments_update(p, zero, std::vector<double>(11, 0.0));
  for (std::size_t f = 0; f < s.size(); ++f) {
    for (std::size_t i = 0; i < 11; ++i) {
      EXPECT_DOUBLE_EQ(next.J_at(f, i), p.boundary_J(f)[i]);
      EXPECT_DOUBLE_EQ(next.K_at(f, i), p.boundary_K(f)[i]);
    }
  }
}

TEST(SpectralSolve, IsothermalEnclosureStaysIsothermal) {
  const Spectrum s = test_spectrum(21);
  const SpectralProblem p(s, Grid1D::uniform(1.0, 20), SpectralSources::blackbody(s, 0.7, 0.7), 0.0);
  SolverControls ctl;
  ctl.tol = 1e-11;
  ctl.max_iters = 200;
  const auto r = solve_spectral(p, ctl);
  ASSERT_TRUE(r.report.converged);
  for (double t : r.T) EXPECT_NEAR(t, 0.7, 1e-9);
  EXPECT_TRUE(r.report.monotone);
}

TEST(SpectralSolve, MaximumPrincipleAndOrdering) {
  const Spectrum s = test_spectrum(21, 0.2);
  const SpectralProblem p(s, Grid1D::uniform(1.5, 20), SpectralSources::blackbody(s, 0.9, 0.4), 0.0);
  SolverControls ctl;
  ctl.max_iters = 100;
  const auto r = solve_spectral(p, ctl);
  ASSERT_TRUE(r.report.converged);
  EXPECT_TRUE(r.report.monotone);
  EXPECT_TRUE(r.report.moments_ordered);
  EXPECT_TRUE(max_principle_check(r.state, r.T, s, 0.9, 0.0).ok());
  const auto low = max_principle_check(r.state, r.T, s, 0.5, 0.0);
  EXPECT_FALSE(low.upper_ok);
  EXPECT_FALSE(low.violations.empty());
}

TEST(SpectralSolve, FirstSourceNormWithinBound) {
  const Spectrum s = test_spectrum(16);
  const SpectralProblem p(s, Grid1D::uniform(3.0, 15), lit_from_above(s, 2.0), 0.0);
  SolverControls ctl;
  ctl.max_iters = 1;
  const auto r = solve_spectral(p, ctl);
  ASSERT_EQ(r.report.source_norm.size(), 1u);
  EXPECT_LE(r.report.source_norm[0], r.report.source_bound * (1 + 1e-12));
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(convergence_rate_check(r.report, p.contraction()).status, RateCheck::Status::inconclusive);
}

TEST(SpectralSolve, ThreadCountDoesNotChangeResults) {
  const Spectrum s = test_spectrum(31, 0.1);
  const auto src = lit_from_above(s, 5.0);
  SolverControls ctl;
  ctl.max_iters = 10;
  const auto one = solve_spectral(SpectralProblem(s, Grid1D::uniform(2.0, 30), src, 0.3, 1), ctl);
  ctl.threads = 3;
  const auto three = solve_spectral(SpectralProblem(s, Grid1D::uniform(2.0, 30), src, 0.3, 3), ctl);
  EXPECT_EQ(one.T, three.T);
  EXPECT_EQ(one.state.J, three.state.J);
  EXPECT_EQ(one.report.sup_dT, three.report.sup_dT);
}

TEST(SpectralSolve, LegacyRayleighVariantDiffers) {
  const Spectrum s = test_spectrum(21, 0.4);
  const SpectralProblem p(s, Grid1D::uniform(2.0, 20), lit_from_above(s, 5.0), 0.0);
  SolverControls ctl;
  ctl.max_iters = 60;
  const auto normal = solve_spectral(p, ctl);
  ctl.rayleigh = RayleighVariant::legacy_h0;
  const auto legacy = solve_spectral(p, ctl);
  double diff = 0.0;
  for (std::size_t i = 0; i < normal.T.size(); ++i) {
    EXPECT_TRUE(std::isfinite(legacy.T[i]));
    diff = std::max(diff, std::abs(normal.T[i] - legacy.T[i]));
  }
  EXPECT_GT(diff, 1e-4);
}

TEST(Intensity, AngularMomentsReproduceTheSweep) {
  const Spectrum s = test_spectrum(21, 0.2);
  const SpectralProblem p(s, Grid1D::uniform(2.0, 20), lit_from_above(s, 4.0), 0.3);
  SolverControls ctl;
  ctl.max_iters = 8;
  const auto r = solve_spectral(p, ctl);
  const auto sweep = moments_update(p, r.state, r.T);
  const auto table = recover_intensity(p, r.state, r.T, 32);
  for (std::size_t f = 0; f < s.size(); f += 7) {
    for (std::size_t i = 0; i < 21; i += 5) {
      const double J = sweep.J_at(f, i), K = sweep.K_at(f, i);
      EXPECT_NEAR(table.moment(f, i, 0), J, 2e-3 * J + 1e-14) << f << " " << i;
      EXPECT_NEAR(table.moment(f, i, 2), K, 2e-3 * J + 1e-14) << f << " " << i;
    }
  }
  for (double v : table.values) EXPECT_GE(v, 0.0);
}
