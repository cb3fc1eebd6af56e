#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stratrt/error.hpp"
#include "stratrt/specfun.hpp"
#include "stratrt/spectral.hpp"

namespace stratrt {

namespace {

constexpr double kPrincipleSlack = 1e-8;
constexpr std::size_t kMinIterations = 5;
constexpr std::size_t kTailLength = 5;

}  // namespace

MaxPrincipleReport max_principle_check(const RadiationState& state, std::span<const double> T,
                                       const Spectrum& spectrum, double T_M, double T_m) {
  if (!(T_M >= T_m) || !(T_m >= 0.0)) {
    throw ArgumentError("max_principle_check: need 0 <= T_m <= T_M");
  }
  if (state.frequencies != spectrum.size() || T.size() != state.nodes) {
    throw ArgumentError("max_principle_check: shapes do not match");
  }
  MaxPrincipleReport rep;
  rep.max_upper_excess = -std::numeric_limits<double>::infinity();
  auto record = [&](bool upper, const char* what, std::size_t f, std::size_t i, double v,
                    double bound) {
    (upper ? rep.upper_ok : rep.lower_ok) = false;
    rep.violations.push_back({what, f, i, v, bound});
  };
  for (std::size_t i = 0; i < state.nodes; ++i) {
    rep.max_upper_excess = std::max(rep.max_upper_excess, T[i] - T_M);
    if (T[i] > T_M + kPrincipleSlack) record(true, "T", 0, i, T[i], T_M);
    if (T[i] < T_m - kPrincipleSlack) record(false, "T", 0, i, T[i], T_m);
  }
  for (std::size_t f = 0; f < state.frequencies; ++f) {
    const double hi = T_M > 0.0 ? planck(spectrum.x[f], T_M) : 0.0;
    const double lo = T_m > 0.0 ? planck(spectrum.x[f], T_m) : 0.0;
    for (std::size_t i = 0; i < state.nodes; ++i) {
      const double j = state.J_at(f, i);
      rep.max_upper_excess = std::max(rep.max_upper_excess, j - hi);
      if (j > hi + kPrincipleSlack) record(true, "J", f, i, j, hi);
      if (j < lo - kPrincipleSlack) record(false, "J", f, i, j, lo);
    }
  }
  return rep;
}

RateCheck convergence_rate_check(const IterationReport& report, double C1) {
  RateCheck rc;
  rc.bound = C1 + 0.02;
  const std::size_t n = report.source_norm.size();
  if (n < kMinIterations) return rc;

  std::vector<double> inc(n);
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    inc[k] = std::abs(report.source_norm[k] - prev);
    prev = report.source_norm[k];
  }
  // Increments below this floor are rounding noise in the norm itself.
  const double floor = 1e-13 * std::max(1.0, std::abs(report.source_norm.back()));
  std::vector<double> ks, logs;
  for (std::size_t k = 1; k < n; ++k) {
    if (inc[k] > floor) {
      ks.push_back(static_cast<double>(k));
      logs.push_back(std::log(inc[k]));
    }
  }
  if (ks.empty()) {
    rc.status = RateCheck::Status::pass;
    rc.ratio = 0.0;
    return rc;
  }
  if (ks.size() < 2) return rc;
  const std::size_t start = ks.size() > kTailLength ? ks.size() - kTailLength : 0;
  double mk = 0.0, ml = 0.0;
  const double m = static_cast<double>(ks.size() - start);
  for (std::size_t k = start; k < ks.size(); ++k) {
    mk += ks[k];
    ml += logs[k];
  }
  mk /= m;
  ml /= m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = start; k < ks.size(); ++k) {
    sxy += (ks[k] - mk) * (logs[k] - ml);
    sxx += (ks[k] - mk) * (ks[k] - mk);
  }
  rc.ratio = std::exp(sxy / sxx);
  rc.status = rc.ratio <= rc.bound ? RateCheck::Status::pass : RateCheck::Status::fail;
  return rc;
}

}  // namespace stratrt
