#include "stratrt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "stratrt/error.hpp"
#include "stratrt/parallel.hpp"
#include "stratrt/specfun.hpp"

namespace stratrt {

namespace {

constexpr double kMonotoneSlack = 1e-10;

void check_albedo_table(const std::vector<double>& a, std::size_t expected, const char* name) {
  if (a.empty()) return;
  if (a.size() != expected) {
    throw ValidationError(std::string("Spectrum: ") + name + " has " + std::to_string(a.size()) +
                          " entries, expected " + std::to_string(expected));
  }
  for (double v : a) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw ValidationError(std::string("Spectrum: ") + name + " outside [0, 1)");
    }
  }
}

}  // namespace

void Spectrum::validate() const {
  const std::size_t F = x.size();
  if (F == 0) throw ValidationError("Spectrum: no frequencies");
  if (weights.size() != F || kappa.size() != F) {
    throw ValidationError("Spectrum: x, weights and kappa must have equal lengths");
  }
  if (!(kappa_max > 0.0) || !std::isfinite(kappa_max)) {
    throw ValidationError("Spectrum: kappa_max must be positive and finite");
  }
  for (std::size_t f = 0; f < F; ++f) {
    if (!(x[f] > 0.0) || (f > 0 && !(x[f] > x[f - 1]))) {
      throw ValidationError("Spectrum: frequencies must be positive and increasing");
    }
    if (!(weights[f] > 0.0) || !std::isfinite(weights[f])) {
      throw ValidationError("Spectrum: weights must be positive");
    }
    if (!(kappa[f] > 0.0 && kappa[f] <= kappa_max)) {
      throw ValidationError("Spectrum: kappa at node " + std::to_string(f) +
                            " outside (0, kappa_max]");
    }
  }
  if (scattering()) {
    if (depth_nodes == 0) throw ValidationError("Spectrum: albedos given without depth_nodes");
    check_albedo_table(albedo_iso, F * depth_nodes, "albedo_iso");
    check_albedo_table(albedo_ray, F * depth_nodes, "albedo_ray");
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t i = 0; i < depth_nodes; ++i) {
        if (!(albedo(f, i) < 1.0)) {
          throw ValidationError("Spectrum: a_iso + a_ray must stay below 1");
        }
      }
    }
  }
}

Spectrum Spectrum::constant(const FrequencyGrid& grid, double kappa0, std::size_t depth_nodes) {
  Spectrum s;
  s.x = grid.x;
  s.weights = grid.weights;
  s.kappa.assign(grid.x.size(), kappa0);
  s.kappa_max = kappa0;
  s.depth_nodes = depth_nodes;
  s.validate();
  return s;
}

RadiationState RadiationState::zeros(std::size_t frequencies, std::size_t nodes) {
  RadiationState s;
  s.frequencies = frequencies;
  s.nodes = nodes;
  s.J.assign(frequencies * nodes, 0.0);
  s.K.assign(frequencies * nodes, 0.0);
  return s;
}

SpectralSources SpectralSources::none(std::size_t frequencies) {
  SpectralSources s;
  s.bottom.assign(frequencies, BoundarySourceSpec{});
  s.top.assign(frequencies, BoundarySourceSpec{});
  for (auto& t : s.top) t.side = BoundarySide::top;
  return s;
}

SpectralSources SpectralSources::blackbody(const Spectrum& spectrum, double T_bottom,
                                           double T_top) {
  SpectralSources s = none(spectrum.size());
  for (std::size_t f = 0; f < spectrum.size(); ++f) {
    s.bottom[f] = {SourceKind::blackbody, T_bottom, BoundarySide::bottom, spectrum.x[f]};
    s.top[f] = {SourceKind::blackbody, T_top, BoundarySide::top, spectrum.x[f]};
  }
  return s;
}

void SpectralSources::validate(std::size_t frequencies) const {
  if (bottom.size() != frequencies || top.size() != frequencies) {
    throw ValidationError("SpectralSources: need one entry per frequency on each face");
  }
  for (const auto* side : {&bottom, &top}) {
    for (const auto& s : *side) {
      if (!(s.magnitude >= 0.0) || !std::isfinite(s.magnitude)) {
        throw ValidationError("SpectralSources: magnitudes must be finite and >= 0");
      }
    }
  }
}

double SpectralSources::bound(const Spectrum& spectrum) const {
  validate(spectrum.size());
  CompensatedSum sum;
  for (std::size_t f = 0; f < spectrum.size(); ++f) {
    for (const auto* s : {&bottom[f], &top[f]}) {
      // int_0^1 mu Q(mu) dmu: Q/3 for |mu| Q, Q/2 for an isotropic Q.
      const double c = s->directional() ? 1.0 / 3.0 : 0.5;
      sum.add(0.5 * spectrum.weights[f] * c * s->intensity_scale());
    }
  }
  return sum.value();
}

SpectralProblem::SpectralProblem(Spectrum spectrum, Grid1D grid, SpectralSources sources,
                                 double ground_albedo, int threads)
    : spectrum_(std::move(spectrum)),
      grid_(std::move(grid)),
      sources_(std::move(sources)),
      alpha_(ground_albedo),
      threads_(resolve_threads(threads)) {
  spectrum_.validate();
  const std::size_t F = spectrum_.size();
  if (spectrum_.scattering() && spectrum_.depth_nodes != grid_.size()) {
    throw ArgumentError("SpectralProblem: albedo tables have " +
                        std::to_string(spectrum_.depth_nodes) + " depth nodes, grid has " +
                        std::to_string(grid_.size()));
  }
  sources_.validate(F);
  for (auto& s : sources_.bottom) s.side = BoundarySide::bottom;
  for (auto& s : sources_.top) s.side = BoundarySide::top;
  if (!(alpha_ >= 0.0 && alpha_ < 1.0)) {
    throw ArgumentError("SpectralProblem: ground albedo must lie in [0, 1)");
  }

  std::vector<std::optional<KernelFamily>> fams(F);
  bnd_J_.assign(F, GridFunction());
  bnd_K_.assign(F, GridFunction());
  parallel_for(F, threads_, [&](std::size_t f) {
    const double k = spectrum_.kappa[f];
    fams[f].emplace(grid_, k, alpha_);
    GridFunction j = boundary_attenuation(grid_, k, sources_.bottom[f], alpha_, Moment::zeroth);
    GridFunction kk = boundary_attenuation(grid_, k, sources_.bottom[f], alpha_, Moment::second);
    const GridFunction jt = boundary_attenuation(grid_, k, sources_.top[f], alpha_, Moment::zeroth);
    const GridFunction kt = boundary_attenuation(grid_, k, sources_.top[f], alpha_, Moment::second);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      j[i] += jt[i];
      kk[i] += kt[i];
    }
    bnd_J_[f] = std::move(j);
    bnd_K_[f] = std::move(kk);
  });
  families_.reserve(F);
  for (auto& fam : fams) families_.push_back(std::move(*fam));
}

void SpectralProblem::source_terms(const RadiationState& state, std::span<const double> T,
                                   std::size_t f, RayleighVariant variant, std::span<double> s0,
                                   std::span<double> s2) const {
  const std::size_t n = grid_.size();
  const double x = spectrum_.x[f];
  const double k_coeff = variant == RayleighVariant::normalized ? 3.0 / 8.0 : 9.0 / 8.0;
  const auto J = state.J_row(f);
  const auto K = state.K_row(f);
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = spectrum_.a_iso(f, i);
    const double ar = spectrum_.a_ray(f, i);
    const double b = T[i] > 0.0 ? planck(x, T[i]) : 0.0;
    s0[i] = (1.0 - ai - ar) * b + ai * J[i] + ar * (9.0 / 8.0 * J[i] - k_coeff * K[i]);
    s2[i] = ar * (-3.0 / 8.0 * J[i] + 9.0 / 8.0 * K[i]);
  }
}

double SpectralProblem::source_norm(const RadiationState& state) const {
  const std::vector<double> tw = grid_.trapezoid_weights();
  CompensatedSum total;
  for (std::size_t f = 0; f < spectrum_.size(); ++f) {
    CompensatedSum col;
    const auto J = state.J_row(f);
    for (std::size_t i = 0; i < J.size(); ++i) col.add(tw[i] * J[i]);
    total.add(spectrum_.weights[f] * spectrum_.kappa[f] * col.value());
  }
  return total.value();
}

double SpectralProblem::contraction() const {
  return contraction_bound(spectrum_.kappa_max, grid_.depth());
}

double rayleigh_phase(double mu, double mu_prime) {
  if (!(std::abs(mu) <= 1.0) || !(std::abs(mu_prime) <= 1.0)) {
    throw ArgumentError("rayleigh_phase: directions must lie in [-1, 1]");
  }
  const double m2 = mu * mu;
  const double p2 = mu_prime * mu_prime;
  return 0.375 * (3.0 - m2 - p2 + 3.0 * m2 * p2);
}

RadiationState moments_update(const SpectralProblem& problem, const RadiationState& state,
                              std::span<const double> T, RayleighVariant variant) {
  const Spectrum& sp = problem.spectrum();
  const std::size_t F = sp.size();
  const std::size_t n = problem.grid().size();
  if (state.frequencies != F || state.nodes != n || state.J.size() != F * n ||
      state.K.size() != F * n) {
    throw ArgumentError("moments_update: state shape does not match the problem");
  }
  check_grid_function(problem.grid(), T, "moments_update temperature");

  RadiationState next = RadiationState::zeros(F, n);
  parallel_for(F, problem.threads(), [&](std::size_t f) {
    std::vector<double> s0(n), s2(n);
    problem.source_terms(state, T, f, variant, s0, s2);
    const KernelFamily& fam = problem.kernels(f);
    auto J = next.J_row(f);
    auto K = next.K_row(f);
    const auto bj = problem.boundary_J(f);
    const auto bk = problem.boundary_K(f);
    std::copy(bj.begin(), bj.end(), J.begin());
    std::copy(bk.begin(), bk.end(), K.begin());
    fam.first().apply(s0, J, true);
    fam.third().apply(s0, K, true);
    bool any_ray = false;
    for (double v : s2) any_ray = any_ray || v != 0.0;
    if (any_ray) {
      fam.third().apply(s2, J, true);
      fam.fifth().apply(s2, K, true);
    }
  });
  return next;
}

SpectralResult solve_spectral(const SpectralProblem& problem, const SolverControls& controls,
                              const IterationObserver& observer) {
  if (!(controls.tol > 0.0)) throw ArgumentError("solve_spectral: tol must be positive");
  if (controls.max_iters < 1) throw ArgumentError("solve_spectral: max_iters must be >= 1");
  const std::size_t F = problem.spectrum().size();
  const std::size_t n = problem.grid().size();

  SpectralResult res;
  res.state = RadiationState::zeros(F, n);
  res.T.assign(n, 0.0);
  IterationReport& rep = res.report;
  rep.source_bound = problem.sources().bound(problem.spectrum());
  rep.contraction = problem.contraction();

  double prev_norm = 0.0;
  double prev_delta = 0.0;
  for (int it = 1; it <= controls.max_iters; ++it) {
    RadiationState next = moments_update(problem, res.state, res.T, controls.rayleigh);
    TemperatureProfile Tn = temperature_update(problem.spectrum(), next, res.T, problem.threads());

    double sup_dT = 0.0;
    double min_dT = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double d = Tn[i] - res.T[i];
      sup_dT = std::max(sup_dT, std::abs(d));
      min_dT = std::min(min_dT, d);
    }
    double min_dJ = std::numeric_limits<double>::infinity();
    double min_dK = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < next.J.size(); ++p) {
      min_dJ = std::min(min_dJ, next.J[p] - res.state.J[p]);
      min_dK = std::min(min_dK, next.K[p] - res.state.K[p]);
      if (next.K[p] < -kMonotoneSlack || next.K[p] > next.J[p] + kMonotoneSlack) {
        rep.moments_ordered = false;
      }
    }
    const double norm = problem.source_norm(next);
    const double delta = norm - prev_norm;
    const double ratio = (it > 1 && prev_delta != 0.0) ? delta / prev_delta : 0.0;

    rep.sup_dT.push_back(sup_dT);
    rep.min_dT.push_back(min_dT);
    rep.min_dJ.push_back(min_dJ);
    rep.min_dK.push_back(min_dK);
    rep.source_norm.push_back(norm);
    rep.ratio.push_back(ratio);
    rep.iterations = it;
    rep.monotone = rep.monotone && min_dT >= -kMonotoneSlack && min_dJ >= -kMonotoneSlack &&
                   min_dK >= -kMonotoneSlack;
    prev_norm = norm;
    prev_delta = delta;

    res.state = std::move(next);
    res.T = std::move(Tn);
    if (observer) observer(it, res.state, res.T);
    if (sup_dT <= controls.tol) {
      rep.converged = true;
      break;
    }
  }
  return res;
}

SpectralResult solve_spectral(const Spectrum& spectrum, const Grid1D& grid,
                              const SpectralSources& sources, double ground_albedo,
                              const SolverControls& controls) {
  const SpectralProblem problem(spectrum, grid, sources, ground_albedo, controls.threads);
  return solve_spectral(problem, controls);
}

}  // namespace stratrt
