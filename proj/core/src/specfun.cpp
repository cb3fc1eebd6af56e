#include "stratrt/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "stratrt/error.hpp"

namespace stratrt {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxTerms = 500;

// Beyond this e^{-x} underflows to a subnormal and E_n(x) < e^{-x}.
constexpr double kUnderflowArgument = 745.0;
constexpr double kPlanckCutoff = 700.0;

double expint_series(int n, double x) {
  const int nm1 = n - 1;
  double ans = (nm1 != 0) ? 1.0 / nm1 : -std::log(x) - kEulerGamma;
  double fact = 1.0;
  for (int i = 1; i <= kMaxTerms; ++i) {
    fact *= -x / i;
    double del;
    if (i != nm1) {
      del = -fact / (i - nm1);
    } else {
      double psi = -kEulerGamma;
      for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
      del = fact * (-std::log(x) + psi);
    }
    ans += del;
    if (std::abs(del) < std::abs(ans) * kEps) return ans;
  }
  throw NumericError("expint: series failed to converge for n=" + std::to_string(n) +
                     ", x=" + std::to_string(x));
}

double expint_continued_fraction(int n, double x) {
  const int nm1 = n - 1;
  double b = x + n;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxTerms; ++i) {
    const double an = -static_cast<double>(i) * (nm1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h * std::exp(-x);
  }
  throw NumericError("expint: continued fraction failed to converge for n=" +
                     std::to_string(n) + ", x=" + std::to_string(x));
}

}  // namespace

double PhysicalScales::stefan_b0_from_constants() const {
  const double pi4 = std::pow(std::numbers::pi, 4);
  return 2.0 * std::pow(boltzmann, 4) * pi4 /
         (15.0 * std::pow(planck_h, 3) * light_speed * light_speed);
}

void PhysicalScales::validate() const {
  if (!(planck_h > 0 && light_speed > 0 && boltzmann > 0 && stefan_b0 > 0 &&
        temperature_scale > 0)) {
    throw ValidationError("physical constants must be strictly positive");
  }
  const double formula = stefan_b0_from_constants();
  if (std::abs(formula - stefan_b0) > 1e-4 * stefan_b0) {
    throw ValidationError("stored B0 disagrees with 2k^4 pi^4/(15 h^3 c^2)");
  }
}

double PhysicalScales::wavelength_um_to_x(double wavelength_um) const {
  if (!(wavelength_um > 0)) throw ArgumentError("wavelength must be positive");
  const double lambda_m = wavelength_um * 1e-6;
  const double reference_kelvin = 1.0 / temperature_scale;
  return planck_h * light_speed / (lambda_m * boltzmann * reference_kelvin);
}

double PhysicalScales::x_to_wavelength_um(double x) const {
  if (!(x > 0)) throw ArgumentError("frequency must be positive");
  const double reference_kelvin = 1.0 / temperature_scale;
  return planck_h * light_speed / (x * boltzmann * reference_kelvin) * 1e6;
}

double expint(int n, double x) {
  if (n < 1) throw DomainError("expint: order must be >= 1");
  if (std::isnan(x) || x < 0.0) throw DomainError("expint: argument must be >= 0");
  if (x == 0.0) {
    if (n == 1) throw DomainError("expint: E_1 is singular at 0");
    return 1.0 / (n - 1);
  }
  if (x > kUnderflowArgument) return 0.0;
  return x > 1.0 ? expint_continued_fraction(n, x) : expint_series(n, x);
}

double expint_segment(int n, double a, double b) {
  if (n < 1) throw DomainError("expint_segment: order must be >= 1");
  if (!(a >= 0.0)) throw ArgumentError("expint_segment: lower limit must be >= 0");
  if (a > b) throw ArgumentError("expint_segment: lower limit exceeds upper limit");
  if (a == b) return 0.0;
  const double upper = std::isinf(b) ? 0.0 : expint(n + 1, b);
  return expint(n + 1, a) - upper;
}

double planck(double x, double T) {
  if (!(x > 0.0)) throw DomainError("planck: frequency must be positive");
  if (!(T >= 0.0)) throw DomainError("planck: temperature must be >= 0");
  if (T == 0.0) return 0.0;
  const double u = x / T;
  if (u > kPlanckCutoff) return 0.0;
  return x * x * x / std::expm1(u);
}

double planck_dT(double x, double T) {
  if (!(x > 0.0)) throw DomainError("planck_dT: frequency must be positive");
  if (!(T > 0.0)) throw DomainError("planck_dT: temperature must be > 0");
  const double u = x / T;
  if (u > kPlanckCutoff) return 0.0;
  // x^3 * (u/T) * e^{-u} / (1 - e^{-u})^2, written to avoid overflow of e^u.
  const double em = std::exp(-u);
  const double denom = -std::expm1(-u);
  return x * x * x * (u / T) * em / (denom * denom);
}

double contraction_bound(double kappa, double Z) {
  if (!(kappa > 0.0) || !(Z > 0.0)) {
    throw DomainError("contraction_bound: kappa and Z must be positive");
  }
  return 1.0 - expint(2, 0.5 * kappa * Z);
}

double contraction_gap(double kappa, double Z) {
  if (!(kappa > 0.0) || !(Z > 0.0)) {
    throw DomainError("contraction_gap: kappa and Z must be positive");
  }
  return expint(2, 0.5 * kappa * Z);
}

}  // namespace stratrt
