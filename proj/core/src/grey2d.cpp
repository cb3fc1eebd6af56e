#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stratrt/error.hpp"
#include "stratrt/grey.hpp"
#include "stratrt/specfun.hpp"

namespace stratrt {

namespace {

constexpr double kMonotoneSlack = 1e-10;

double pos4(double t) {
  const double p = std::max(t, 0.0);
  return p * p * p * p;
}

// Derivative of samples f on the x nodes: centred differences inside, even
// reflection at x = 0 (so f' = 0 on the axis) and one-sided at the far end.
std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double hl = x[j] - x[j - 1];
    const double hr = x[j + 1] - x[j];
    d[j] = (hl * hl * f[j + 1] - hr * hr * f[j - 1] + (hr * hr - hl * hl) * f[j]) /
           (hl * hr * (hl + hr));
  }
  d[n - 1] = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
  return d;
}

}  // namespace

void Terrain2D::validate() const {
  if (x.size() < 3) throw ValidationError("Terrain2D: need at least three x nodes");
  if (z_min.size() != x.size()) throw ValidationError("Terrain2D: z_min size mismatch");
  if (x.front() != 0.0) throw ValidationError("Terrain2D: x must start at the axis x = 0");
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    if (!(x[j + 1] > x[j])) throw ValidationError("Terrain2D: x must increase strictly");
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(depth(j) > 1e-8 * std::max(1.0, std::abs(z_max)))) {
      throw ValidationError("Terrain2D: column " + std::to_string(j) + " has no depth");
    }
  }
  if (sigma_intervals < 2) throw ValidationError("Terrain2D: need at least two sigma intervals");
}

Terrain2D quarter_disc_terrain(std::size_t x_intervals, std::size_t sigma_intervals,
                               double edge_fraction) {
  if (!(edge_fraction > 0.0 && edge_fraction < 1.0)) {
    throw ArgumentError("quarter_disc_terrain: edge_fraction must lie in (0, 1)");
  }
  Terrain2D t;
  t.z_max = 10.0;
  t.sigma_intervals = sigma_intervals;
  const double x_end = 30.0 * edge_fraction;
  for (std::size_t j = 0; j <= x_intervals; ++j) {
    const double xj = x_end * static_cast<double>(j) / static_cast<double>(x_intervals);
    const double r = xj / 30.0;
    t.x.push_back(xj);
    t.z_min.push_back(10.0 - 10.0 * std::sqrt(1.0 - r * r));
  }
  t.validate();
  return t;
}

Terrain2D flat_terrain(double x_max, double z_min, double z_max, std::size_t x_intervals,
                       std::size_t sigma_intervals) {
  Terrain2D t;
  t.z_max = z_max;
  t.sigma_intervals = sigma_intervals;
  for (std::size_t j = 0; j <= x_intervals; ++j) {
    t.x.push_back(x_max * static_cast<double>(j) / static_cast<double>(x_intervals));
    t.z_min.push_back(z_min);
  }
  t.validate();
  return t;
}

Grey2DResult grey_solve_2d(const Terrain2D& terrain, const GreyConfig& config) {
  terrain.validate();
  config.validate();

  const std::size_t nx = terrain.x.size();
  const std::size_t ns = terrain.sigma_intervals + 1;
  const std::size_t total = nx * ns;
  const double dsig = 1.0 / static_cast<double>(terrain.sigma_intervals);
  auto idx = [ns](std::size_t j, std::size_t k) { return j * ns + k; };
  auto sigma = [dsig](std::size_t k) { return dsig * static_cast<double>(k); };

  Grey2DResult out;
  out.nx = nx;
  out.nsigma = ns;
  out.x.resize(total);
  out.z.resize(total);
  out.T_e.resize(total);
  out.T.assign(total, 0.0);

  std::vector<double> D(nx);
  for (std::size_t j = 0; j < nx; ++j) D[j] = terrain.depth(j);
  const std::vector<double> dD = derivative(terrain.x, D);
  std::vector<double> g(nx);
  for (std::size_t j = 0; j < nx; ++j) g[j] = dD[j] / D[j];
  const std::vector<double> dg = derivative(terrain.x, g);

  // Column kernels act on heights above the bottom, ascending, i.e. sigma
  // index k maps to column position ns - 1 - k.
  std::vector<KernelOperator> kernels;
  kernels.reserve(nx);
  std::vector<double> te4(total);
  for (std::size_t j = 0; j < nx; ++j) {
    std::vector<double> offsets(ns);
    for (std::size_t p = 0; p < ns; ++p) offsets[p] = (1.0 - sigma(ns - 1 - p)) * D[j];
    offsets.front() = 0.0;
    kernels.emplace_back(Grid1D(std::move(offsets)), config.kappa, 1, 0.0);
    for (std::size_t k = 0; k < ns; ++k) {
      const double depth_below_surface = sigma(k) * D[j];
      const double flux = 0.5 * config.Q * expint(3, config.kappa * depth_below_surface);
      const double te = std::pow(flux, 0.25) * config.T_sun;
      out.x[idx(j, k)] = terrain.x[j];
      out.z[idx(j, k)] = terrain.z_max - depth_below_surface;
      out.T_e[idx(j, k)] = te;
      te4[idx(j, k)] = pos4(te);
    }
  }

  // Transformed operator -kbar (V_xx - 2 s g V_xs + (s^2 g^2 + 1/D^2) V_ss + s (g^2 - g') V_s)
  // with ghost reflection on the sides and at the surface, Dirichlet at the bottom.
  const double kbar = config.kbar_T;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(total * 9);
  std::vector<bool> dirichlet(total, false);
  for (std::size_t j = 0; j < nx; ++j) {
    const bool left = j == 0;
    const bool right = j + 1 == nx;
    const std::size_t jl = left ? 1 : j - 1;
    const std::size_t jr = right ? nx - 2 : j + 1;
    const double hl = left ? terrain.x[1] - terrain.x[0] : terrain.x[j] - terrain.x[j - 1];
    const double hr = right ? terrain.x[j] - terrain.x[j - 1] : terrain.x[j + 1] - terrain.x[j];
    const double cxl = 2.0 / ((hl + hr) * hl);
    const double cxr = 2.0 / ((hl + hr) * hr);
    // The mixed derivative vanishes under reflection on either side.
    const double cmix = (left || right) ? 0.0 : 1.0 / ((hl + hr) * 2.0 * dsig);

    for (std::size_t k = 0; k < ns; ++k) {
      const std::size_t p = idx(j, k);
      if (k + 1 == ns) {
        dirichlet[p] = true;
        trips.emplace_back(p, p, 1.0);
        continue;
      }
      const double s = sigma(k);
      const double css = s * s * g[j] * g[j] + 1.0 / (D[j] * D[j]);
      const double cs = s * (g[j] * g[j] - dg[j]);
      const double cxs = -2.0 * s * g[j];
      const std::size_t kd = k + 1;
      const std::size_t ku = (k == 0) ? 1 : k - 1;
      const double wss = css / (dsig * dsig);
      const double ws = (k == 0) ? 0.0 : cs / (2.0 * dsig);

      double diag = 0.0;
      auto add = [&](std::size_t q, double w) {
        if (q == p) {
          diag += w;
        } else {
          trips.emplace_back(p, q, w);
        }
      };
      add(idx(jl, k), -kbar * cxl);
      add(idx(jr, k), -kbar * cxr);
      diag += kbar * (cxl + cxr);
      add(idx(j, kd), -kbar * (wss + ws));
      add(idx(j, ku), -kbar * (wss - ws));
      diag += 2.0 * kbar * wss;
      if (cmix != 0.0 && k > 0) {
        const double w = -kbar * cxs * cmix;
        add(idx(j + 1, k + 1), w);
        add(idx(j + 1, k - 1), -w);
        add(idx(j - 1, k + 1), -w);
        add(idx(j - 1, k - 1), w);
      }
      trips.emplace_back(p, p, diag);
    }
  }
  Eigen::SparseMatrix<double> L(static_cast<Eigen::Index>(total),
                                static_cast<Eigen::Index>(total));
  L.setFromTriplets(trips.begin(), trips.end());
  L.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(L);

  Eigen::VectorXd T = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
  std::vector<double> column(ns), column_emit(ns);
  GreyReport& rep = out.report;

  for (int it = 1; it <= config.outer_iters; ++it) {
    // Half step: T_e^4 + column kernel of T^4.
    Eigen::VectorXd src(static_cast<Eigen::Index>(total));
    for (std::size_t j = 0; j < nx; ++j) {
      for (std::size_t p = 0; p < ns; ++p) column_emit[p] = pos4(T[idx(j, ns - 1 - p)]);
      kernels[j].apply(column_emit, column);
      for (std::size_t p = 0; p < ns; ++p) {
        const std::size_t q = idx(j, ns - 1 - p);
        src[q] = te4[q] + column[p];
      }
    }
    const double src_sup = src.cwiseAbs().maxCoeff();

    Eigen::VectorXd next(static_cast<Eigen::Index>(total));
    if (kbar == 0.0) {
      for (std::size_t p = 0; p < total; ++p) next[p] = std::pow(src[p], 0.25);
    } else {
      next = (it == 1) ? src.array().pow(0.25).matrix() : T;
      for (std::size_t p = 0; p < total; ++p) {
        if (dirichlet[p]) next[p] = out.T_e[p];
      }
      const double inner_tol = 1e-2 * config.tol * (1.0 + src_sup);
      double residual = 0.0;
      for (int m = 1; m <= std::max(60, config.inner_iters); ++m) {
        Eigen::SparseMatrix<double> M = L;
        Eigen::VectorXd b(static_cast<Eigen::Index>(total));
        for (std::size_t p = 0; p < total; ++p) {
          if (dirichlet[p]) {
            b[p] = out.T_e[p];
            continue;
          }
          const double tp = std::max(next[p], 0.0);
          M.coeffRef(p, p) += 4.0 * tp * tp * tp;
          b[p] = src[p] + 3.0 * pos4(tp);
        }
        lu.factorize(M);
        if (lu.info() != Eigen::Success) {
          throw NumericError("grey_solve_2d: sparse factorization failed at outer iteration " +
                             std::to_string(it));
        }
        Eigen::VectorXd step = lu.solve(b);
        const double update = (step - next).cwiseAbs().maxCoeff();
        next = step;

        Eigen::VectorXd r = L * next;
        residual = 0.0;
        for (std::size_t p = 0; p < total; ++p) {
          if (dirichlet[p]) continue;
          residual = std::max(residual, std::abs(r[p] + pos4(next[p]) - src[p]));
        }
        if (m >= config.inner_iters && residual <= inner_tol) break;
        if (update <= 1e-15 * (1.0 + next.cwiseAbs().maxCoeff())) break;
      }
      rep.max_inner_residual = std::max(rep.max_inner_residual, residual);
    }

    double sup_inc = 0.0;
    double min_inc = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < total; ++p) {
      next[p] = std::max(next[p], 0.0);
      const double d = next[p] - T[p];
      sup_inc = std::max(sup_inc, std::abs(d));
      min_inc = std::min(min_inc, d);
    }
    rep.sup_increments.push_back(sup_inc);
    rep.min_increments.push_back(min_inc);
    rep.monotone = rep.monotone && min_inc >= -kMonotoneSlack;
    rep.iterations = it;
    T = next;
    if (sup_inc <= config.tol) {
      rep.converged = true;
      break;
    }
  }
  for (std::size_t p = 0; p < total; ++p) out.T[p] = T[p];
  return out;
}

}  // namespace stratrt
