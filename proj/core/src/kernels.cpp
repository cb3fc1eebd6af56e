#include "stratrt/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "stratrt/detail/segment_moments.hpp"
#include "stratrt/error.hpp"
#include "stratrt/specfun.hpp"

namespace stratrt {

namespace {

void check_kernel_args(double kappa, int order, double albedo) {
  if (order != 1 && order != 3 && order != 5) {
    throw ArgumentError("kernel order must be 1, 3 or 5, got " + std::to_string(order));
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw ArgumentError("kernel: kappa must be positive and finite");
  }
  if (!(albedo >= 0.0 && albedo < 1.0)) throw ArgumentError("kernel: albedo must lie in [0, 1)");
}

// Assembles the matrices for the requested orders in one sweep. Per row the
// values E_m at every node separation (m = n+1, n+2) are tabulated once and
// shared by all segments that use the closed form.
std::vector<std::vector<double>> assemble(const Grid1D& grid, double kappa, double albedo,
                                          std::span<const int> orders) {
  const std::size_t n = grid.size();
  std::vector<std::vector<double>> mats(orders.size(), std::vector<double>(n * n, 0.0));

  // Table index m in [2, 7].
  constexpr int kMaxM = 7;
  std::array<std::vector<double>, kMaxM + 1> direct;
  std::array<std::vector<double>, kMaxM + 1> image;
  std::array<bool, kMaxM + 1> wanted{};
  for (int order : orders) {
    wanted[order + 1] = true;
    wanted[order + 2] = true;
  }
  for (int m = 2; m <= kMaxM; ++m) {
    if (wanted[m]) {
      direct[m].resize(n);
      image[m].resize(n);
    }
  }

  bool any_closed = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    any_closed = any_closed || detail::closed_form_applies(kappa * grid.spacing(k));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double tau = grid[i];
    if (any_closed) {
      for (std::size_t j = 0; j < n; ++j) {
        const double dd = kappa * std::abs(tau - grid[j]);
        const double di = kappa * (tau + grid[j]);
        for (int m = 2; m <= kMaxM; ++m) {
          if (!wanted[m]) continue;
          direct[m][j] = expint(m, dd);
          if (albedo > 0.0) image[m][j] = expint(m, di);
        }
      }
    }

    for (std::size_t o = 0; o < orders.size(); ++o) {
      const int order = orders[o];
      double* row = mats[o].data() + i * n;
      auto deposit = [row](std::size_t near_node, std::size_t far_node, detail::SegmentMoments m,
                           double weight) {
        const double far_part = std::max(m.far_weighted, 0.0);
        const double near_part = std::max(m.total - far_part, 0.0);
        row[near_node] += 0.5 * weight * near_part;
        row[far_node] += 0.5 * weight * far_part;
      };

      for (std::size_t k = 0; k + 1 < n; ++k) {
        const double width = kappa * grid.spacing(k);
        const bool closed = detail::closed_form_applies(width);
        // Direct term: the near end of the segment is the one closer to tau_i.
        const bool right = k >= i;
        const std::size_t near_node = right ? k : k + 1;
        const std::size_t far_node = right ? k + 1 : k;
        detail::SegmentMoments m;
        if (closed) {
          m = detail::segment_moments_closed(width, direct[order + 1][near_node],
                                             direct[order + 1][far_node],
                                             direct[order + 2][near_node],
                                             direct[order + 2][far_node]);
        } else {
          m = detail::segment_moments(order, kappa * std::abs(tau - grid[near_node]), width);
        }
        deposit(near_node, far_node, m, 1.0);

        if (albedo > 0.0) {
          // Image term: distance tau_i + t grows with t, so node k is near.
          detail::SegmentMoments mi;
          if (closed) {
            mi = detail::segment_moments_closed(width, image[order + 1][k], image[order + 1][k + 1],
                                                image[order + 2][k], image[order + 2][k + 1]);
          } else {
            mi = detail::segment_moments(order, kappa * (tau + grid[k]), width);
          }
          deposit(k, k + 1, mi, albedo);
        }
      }
    }
  }
  return mats;
}

}  // namespace

KernelOperator::KernelOperator(Grid1D grid, double kappa, int order, double albedo)
    : grid_(std::move(grid)), kappa_(kappa), order_(order), albedo_(albedo) {
  check_kernel_args(kappa, order, albedo);
  const std::array<int, 1> orders{order};
  matrix_ = std::move(assemble(grid_, kappa, albedo, orders).front());
}

KernelOperator::KernelOperator(Grid1D grid, double kappa, int order, double albedo,
                               std::vector<double> matrix)
    : grid_(std::move(grid)),
      kappa_(kappa),
      order_(order),
      albedo_(albedo),
      matrix_(std::move(matrix)) {}

std::span<const double> KernelOperator::row(std::size_t i) const {
  if (i >= size()) throw ArgumentError("KernelOperator::row: index out of range");
  return std::span<const double>(matrix_).subspan(i * size(), size());
}

void KernelOperator::apply(std::span<const double> values, std::span<double> out,
                           bool accumulate) const {
  const std::size_t n = size();
  if (values.size() != n || out.size() != n) {
    throw ArgumentError("KernelOperator::apply: length " + std::to_string(values.size()) +
                        " does not match grid size " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = matrix_.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += a[j] * values[j];
    out[i] = accumulate ? out[i] + acc : acc;
  }
}

GridFunction KernelOperator::apply(std::span<const double> values) const {
  GridFunction out(size(), 0.0);
  apply(values, out);
  return out;
}

double KernelOperator::max_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double s = 0.0;
    for (double a : row(i)) s += a;
    best = std::max(best, s);
  }
  return best;
}

KernelFamily::KernelFamily(const Grid1D& grid, double kappa, double albedo) {
  check_kernel_args(kappa, 1, albedo);
  constexpr std::array<int, 3> orders{1, 3, 5};
  auto mats = assemble(grid, kappa, albedo, orders);
  ops_.reserve(3);
  for (std::size_t o = 0; o < orders.size(); ++o) {
    ops_.push_back(KernelOperator(grid, kappa, orders[o], albedo, std::move(mats[o])));
  }
}

const KernelOperator& KernelFamily::order(int n) const {
  switch (n) {
    case 1: return ops_[0];
    case 3: return ops_[1];
    case 5: return ops_[2];
    default: throw ArgumentError("KernelFamily: order must be 1, 3 or 5");
  }
}

KernelOperator build_kernel(const Grid1D& grid, double kappa, int order, double albedo) {
  return KernelOperator(grid, kappa, order, albedo);
}

GridFunction apply_kernel(const KernelOperator& op, std::span<const double> values) {
  check_grid_function(op.grid(), values, "apply_kernel");
  return op.apply(values);
}

double BoundarySourceSpec::intensity_scale() const {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw ArgumentError("boundary source magnitude must be finite and >= 0");
  }
  if (kind == SourceKind::blackbody) {
    if (!(frequency > 0.0)) throw ArgumentError("blackbody boundary source needs a frequency");
    return planck(frequency, magnitude);
  }
  return magnitude;
}

GridFunction boundary_attenuation(const Grid1D& grid, double kappa, const BoundarySourceSpec& spec,
                                  double albedo, Moment moment) {
  if (!(kappa > 0.0)) throw ArgumentError("boundary_attenuation: kappa must be positive");
  if (!(albedo >= 0.0 && albedo < 1.0)) {
    throw ArgumentError("boundary_attenuation: albedo must lie in [0, 1)");
  }
  const double q = spec.intensity_scale();
  // Directional sources carry one extra power of mu, which shifts E_n up by one.
  int m = spec.directional() ? 3 : 2;
  if (moment == Moment::second) m += 2;

  GridFunction out(grid.size(), 0.0);
  if (q == 0.0) return out;
  const double Z = grid.depth();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double tau = grid[i];
    if (spec.side == BoundarySide::bottom) {
      out[i] = 0.5 * q * expint(m, kappa * tau);
    } else {
      out[i] = 0.5 * q * expint(m, kappa * (Z - tau));
      if (albedo > 0.0) out[i] += 0.5 * albedo * q * expint(m, kappa * (Z + tau));
    }
  }
  return out;
}

}  // namespace stratrt
