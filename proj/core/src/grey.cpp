#include "stratrt/grey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stratrt/error.hpp"
#include "stratrt/specfun.hpp"
#include "stratrt/tridiagonal.hpp"

namespace stratrt {

namespace {

constexpr double kMonotoneSlack = 1e-10;
constexpr double kRegularization = 1e-12;

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double pos4(double t) {
  const double p = std::max(t, 0.0);
  const double p2 = p * p;
  return p2 * p2;
}

// Second-difference stencil of -kbar T'' at node i (ghost reflection at the ends).
struct Stencil {
  double lower = 0.0;
  double diag = 0.0;
  double upper = 0.0;
};

Stencil diffusion_stencil(double kbar, const Grid1D& grid, std::size_t i) {
  const std::size_t n = grid.size();
  Stencil s;
  if (i == 0) {
    const double h = grid.spacing(0);
    s.upper = -2.0 * kbar / (h * h);
  } else if (i == n - 1) {
    const double h = grid.spacing(n - 2);
    s.lower = -2.0 * kbar / (h * h);
  } else {
    const double hl = grid.spacing(i - 1);
    const double hr = grid.spacing(i);
    s.lower = -2.0 * kbar / ((hl + hr) * hl);
    s.upper = -2.0 * kbar / ((hl + hr) * hr);
  }
  s.diag = -(s.lower + s.upper);
  return s;
}

bool node_is_free(std::size_t i, std::size_t n, const BoundaryCondition& bottom,
                  const BoundaryCondition& top) {
  if (i == 0 && bottom.is_dirichlet()) return false;
  if (i == n - 1 && top.is_dirichlet()) return false;
  return true;
}

double nonlinear_residual(double kbar, const Grid1D& grid, std::span<const double> T,
                          std::span<const double> rhs, const BoundaryCondition& bottom,
                          const BoundaryCondition& top) {
  const std::size_t n = grid.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!node_is_free(i, n, bottom, top)) continue;
    const Stencil s = diffusion_stencil(kbar, grid, i);
    double lap = s.diag * T[i];
    if (i > 0) lap += s.lower * T[i - 1];
    if (i + 1 < n) lap += s.upper * T[i + 1];
    worst = std::max(worst, std::abs(lap + pos4(T[i]) - rhs[i]));
  }
  return worst;
}

}  // namespace

void GreyConfig::validate() const {
  std::vector<std::string> bad;
  if (!(kappa > 0.0) || !std::isfinite(kappa)) bad.push_back("kappa must be positive");
  if (!(albedo_a >= 0.0 && albedo_a < 1.0)) bad.push_back("albedo_a must lie in [0, 1)");
  if (!(kbar_T >= 0.0) || !std::isfinite(kbar_T)) bad.push_back("kbar_T must be >= 0");
  if (!(Q >= 0.0) || !std::isfinite(Q)) bad.push_back("Q must be >= 0");
  if (!(T_sun >= 0.0) || !std::isfinite(T_sun)) bad.push_back("T_sun must be >= 0");
  if (!(z_max > z_min)) bad.push_back("z_max must exceed z_min");
  if (!(tol > 0.0)) bad.push_back("tol must be positive");
  if (outer_iters < 1 || inner_iters < 1) bad.push_back("iteration counts must be >= 1");
  for (const auto* bc : {&bc_bottom, &bc_top}) {
    if (bc->is_dirichlet() && !(bc->value >= 0.0)) {
      bad.push_back("Dirichlet values must be >= 0");
      break;
    }
  }
  if (bad.empty()) return;
  std::string msg = "invalid GreyConfig:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw ValidationError(msg);
}

Grid1D grey_grid(const GreyConfig& config, std::size_t intervals) {
  config.validate();
  return Grid1D::uniform(config.z_max - config.z_min, intervals);
}

double equilibrium_temperature(const GreyConfig& config, double z) {
  const double slack = 1e-12 * (config.z_max - config.z_min);
  if (!(z >= config.z_min - slack && z <= config.z_max + slack)) {
    throw ArgumentError("equilibrium_temperature: z = " + std::to_string(z) +
                        " outside [z_min, z_max]");
  }
  const double d = std::max(config.z_max - z, 0.0);
  const double flux = 0.5 * config.Q * expint(3, config.kappa * d);
  return std::pow(flux, 0.25) * config.T_sun;
}

GridFunction equilibrium_forcing(const GreyConfig& config, const Grid1D& grid) {
  GridFunction te4(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    te4[i] = pos4(equilibrium_temperature(config, config.z_min + grid[i]));
  }
  return te4;
}

GridFunction halfstep_source(const GreyConfig& config, const Grid1D& grid,
                             std::span<const double> T) {
  config.validate();
  const KernelOperator k1 = build_kernel(grid, config.kappa, 1, 0.0);
  const GridFunction te4 = equilibrium_forcing(config, grid);
  return halfstep_source(config, k1, te4, T);
}

GridFunction halfstep_source(const GreyConfig& config, const KernelOperator& k1,
                             std::span<const double> te4, std::span<const double> T) {
  check_grid_function(k1.grid(), T, "halfstep_source");
  check_grid_function(k1.grid(), te4, "halfstep_source");
  for (double t : T) {
    if (t < 0.0) throw ArgumentError("halfstep_source: temperatures must be >= 0");
  }
  const std::size_t n = T.size();
  const double a = config.albedo_a;
  GridFunction emit(n);
  for (std::size_t i = 0; i < n; ++i) emit[i] = (1.0 - a) * pos4(T[i]);
  GridFunction base = k1.apply(emit);
  for (std::size_t i = 0; i < n; ++i) base[i] += te4[i];
  if (a == 0.0) return base;

  // j = base + a K_1 j. The Neumann series has nonnegative terms and ratio
  // a * C_1 < 1, so plain iteration converges monotonically from j = base.
  GridFunction j = base;
  GridFunction kj(n);
  for (int it = 0; it < 2000; ++it) {
    k1.apply(j, kj);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = base[i] + a * kj[i];
      change = std::max(change, std::abs(next - j[i]));
      j[i] = next;
    }
    if (change <= 1e-15 * (1.0 + sup_abs(j))) return j;
  }
  throw NumericError("halfstep_source: scattering iteration did not converge");
}

GridFunction solve_reaction_diffusion_1d(double kbar_T, const Grid1D& grid,
                                         std::span<const double> rhs, BoundaryCondition bottom,
                                         BoundaryCondition top, const InnerControls& controls,
                                         InnerSolveReport* report,
                                         std::span<const double> initial) {
  check_grid_function(grid, rhs, "solve_reaction_diffusion_1d");
  if (!(kbar_T >= 0.0)) throw ArgumentError("solve_reaction_diffusion_1d: kbar_T must be >= 0");
  for (double r : rhs) {
    if (r < 0.0) throw ArgumentError("solve_reaction_diffusion_1d: rhs must be >= 0");
  }
  const std::size_t n = grid.size();
  InnerSolveReport local;
  InnerSolveReport& rep = report ? *report : local;
  rep = InnerSolveReport{};

  GridFunction T(n);
  if (kbar_T == 0.0) {
    for (std::size_t i = 0; i < n; ++i) T[i] = std::pow(rhs[i], 0.25);
    rep.converged = true;
    return T;
  }

  if (!initial.empty()) {
    check_grid_function(grid, initial, "solve_reaction_diffusion_1d initial");
    T.assign(initial.begin(), initial.end());
  } else {
    for (std::size_t i = 0; i < n; ++i) T[i] = std::pow(rhs[i], 0.25);
  }
  if (bottom.is_dirichlet()) T.front() = bottom.value;
  if (top.is_dirichlet()) T.back() = top.value;

  const bool pure_neumann = !bottom.is_dirichlet() && !top.is_dirichlet();
  std::vector<double> lo(n), di(n), up(n), b(n);
  const int max_iters = std::max(controls.max_iters, controls.min_iters);
  for (int m = 1; m <= max_iters; ++m) {
    bool all_zero = true;
    for (double t : T) all_zero = all_zero && !(t > 0.0);
    const bool shift = pure_neumann && all_zero;
    rep.regularized = rep.regularized || shift;

    for (std::size_t i = 0; i < n; ++i) {
      if (!node_is_free(i, n, bottom, top)) {
        lo[i] = up[i] = 0.0;
        di[i] = 1.0;
        b[i] = (i == 0) ? bottom.value : top.value;
        continue;
      }
      const Stencil s = diffusion_stencil(kbar_T, grid, i);
      const double tp = std::max(T[i], 0.0);
      lo[i] = s.lower;
      up[i] = s.upper;
      di[i] = s.diag + 4.0 * tp * tp * tp + (shift ? kRegularization : 0.0);
      b[i] = rhs[i] + 3.0 * pos4(tp);
    }
    GridFunction next = solve_tridiagonal(lo, di, up, b);
    double update = 0.0;
    for (std::size_t i = 0; i < n; ++i) update = std::max(update, std::abs(next[i] - T[i]));
    T = std::move(next);
    rep.iterations = m;
    rep.residual = nonlinear_residual(kbar_T, grid, T, rhs, bottom, top);
    if (m < controls.min_iters) continue;
    if (rep.residual <= controls.tol) {
      rep.converged = true;
      break;
    }
    // Rounding floor: the update has stopped moving the iterate.
    if (update <= 1e-15 * (1.0 + sup_abs(T))) break;
  }
  return T;
}

GreyResult grey_iterate(const GreyConfig& config, const Grid1D& grid,
                        const std::function<void(int, std::span<const double>)>& observer) {
  config.validate();
  if (std::abs(grid.depth() - (config.z_max - config.z_min)) >
      1e-12 * (config.z_max - config.z_min)) {
    throw ArgumentError("grey_iterate: grid depth does not match the z range");
  }
  const std::size_t n = grid.size();
  const KernelOperator k1 = build_kernel(grid, config.kappa, 1, 0.0);
  const GridFunction te4 = equilibrium_forcing(config, grid);

  GreyResult result{grid, GridFunction(n), GridFunction(n), GridFunction(n, 0.0), {}};
  for (std::size_t i = 0; i < n; ++i) {
    result.z[i] = config.z_min + grid[i];
    result.T_e[i] = std::pow(te4[i], 0.25);
  }

  GreyReport& rep = result.report;
  GridFunction& T = result.T;
  for (int it = 1; it <= config.outer_iters; ++it) {
    const GridFunction src = halfstep_source(config, k1, te4, T);
    InnerControls inner;
    inner.min_iters = config.inner_iters;
    inner.tol = 1e-2 * config.tol * (1.0 + sup_abs(src));
    InnerSolveReport irep;
    GridFunction next = solve_reaction_diffusion_1d(
        config.kbar_T, grid, src, config.bc_bottom, config.bc_top, inner, &irep,
        it > 1 ? std::span<const double>(T) : std::span<const double>());
    rep.regularized = rep.regularized || irep.regularized;
    rep.max_inner_residual = std::max(rep.max_inner_residual, irep.residual);

    double sup_inc = 0.0;
    double min_inc = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = std::max(next[i], 0.0);
      const double d = next[i] - T[i];
      sup_inc = std::max(sup_inc, std::abs(d));
      min_inc = std::min(min_inc, d);
    }
    rep.sup_increments.push_back(sup_inc);
    rep.min_increments.push_back(min_inc);
    rep.monotone = rep.monotone && min_inc >= -kMonotoneSlack;
    rep.iterations = it;
    T = std::move(next);
    if (observer) observer(it, T);
    if (sup_inc <= config.tol) {
      rep.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace stratrt
