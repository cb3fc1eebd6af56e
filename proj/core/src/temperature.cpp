#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "stratrt/error.hpp"
#include "stratrt/parallel.hpp"
#include "stratrt/specfun.hpp"
#include "stratrt/spectral.hpp"

namespace stratrt {

namespace {

constexpr int kMaxDoublings = 60;
constexpr int kBisectionSteps = 8;
constexpr int kMaxSteps = 200;
constexpr double kRelTol = 1e-13;

// Emission sum_f c_f B(x_f, T) and its T-derivative.
struct Emission {
  const std::vector<double>& x;
  const std::vector<double>& c;

  double value(double T) const {
    if (T <= 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t f = 0; f < x.size(); ++f) s += c[f] * planck(x[f], T);
    return s;
  }
  double slope(double T) const {
    double s = 0.0;
    for (std::size_t f = 0; f < x.size(); ++f) s += c[f] * planck_dT(x[f], T);
    return s;
  }
};

double invert(const Emission& e, double target, double T_start, std::size_t node) {
  if (!(target > 0.0)) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, T_start);
  int doublings = 0;
  while (e.value(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxDoublings) {
      throw NumericError("temperature_update: no bracket at node " + std::to_string(node) +
                         " after 60 doublings (target " + std::to_string(target) +
                         ", upper " + std::to_string(hi) + ")");
    }
  }
  for (int k = 0; k < kBisectionSteps; ++k) {
    const double mid = 0.5 * (lo + hi);
    (e.value(mid) < target ? lo : hi) = mid;
  }
  double T = 0.5 * (lo + hi);
  for (int k = 0; k < kMaxSteps; ++k) {
    const double r = e.value(T) - target;
    if (std::abs(r) <= kRelTol * target) return T;
    (r < 0.0 ? lo : hi) = T;
    const double d = e.slope(T);
    double next = (d > 0.0) ? T - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - T) <= 4.0 * std::numeric_limits<double>::epsilon() * T) return next;
    T = next;
  }
  return T;
}

}  // namespace

TemperatureProfile temperature_update(const Spectrum& spectrum, const RadiationState& state,
                                      std::span<const double> hint, unsigned threads) {
  const std::size_t F = spectrum.size();
  if (state.frequencies != F || state.J.size() != F * state.nodes) {
    throw ArgumentError("temperature_update: state does not match the spectrum");
  }
  const std::size_t n = state.nodes;
  if (!hint.empty() && hint.size() != n) {
    throw ArgumentError("temperature_update: hint length does not match the depth grid");
  }
  for (double j : state.J) {
    if (!(j >= 0.0)) throw ArgumentError("temperature_update: J must be finite and >= 0");
  }
  double start = 1.0;
  for (double t : hint) start = std::max(start, t);

  TemperatureProfile T(n, 0.0);
  parallel_for(n, std::max(1u, threads), [&](std::size_t i) {
    std::vector<double> c(F);
    double target = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
      c[f] = spectrum.weights[f] * spectrum.kappa[f] *
             (1.0 - (spectrum.scattering() ? spectrum.albedo(f, i) : 0.0));
      target += c[f] * state.J_at(f, i);
    }
    const Emission e{spectrum.x, c};
    T[i] = invert(e, target, start, i);
  });
  return T;
}

}  // namespace stratrt
