#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stratrt/grid.hpp"

namespace stratrt {

/// Dense matrix for the map
///
///   H  ->  (1/2) int_0^Z kappa [E_n(kappa |tau_i - t|) + alpha E_n(kappa (tau_i + t))] H(t) dt
///
/// evaluated at every node tau_i, with H the piecewise-linear interpolant of
/// its nodal values. Entries come from exact antiderivatives of E_n against
/// the hat functions, so the result is exact for piecewise-linear data up to
/// the accuracy of expint. The factor kappa is part of the operator: with
/// H = 1, order 1 and alpha = 0 the row sums are the contraction integrals
/// bounded by contraction_bound(kappa, Z).
///
/// Immutable after construction and safe to apply from several threads.
class KernelOperator {
 public:
  /// order must be 1, 3 or 5; kappa > 0; 0 <= albedo < 1.
  KernelOperator(Grid1D grid, double kappa, int order, double albedo);

  const Grid1D& grid() const { return grid_; }
  double kappa() const { return kappa_; }
  int order() const { return order_; }
  double albedo() const { return albedo_; }
  std::size_t size() const { return grid_.size(); }

  double operator()(std::size_t row, std::size_t col) const { return matrix_[row * size() + col]; }
  std::span<const double> row(std::size_t i) const;

  /// out = A * values (or out += A * values with accumulate).
  void apply(std::span<const double> values, std::span<double> out,
             bool accumulate = false) const;
  GridFunction apply(std::span<const double> values) const;

  double max_row_sum() const;

 private:
  friend class KernelFamily;
  KernelOperator(Grid1D grid, double kappa, int order, double albedo, std::vector<double> matrix);

  Grid1D grid_;
  double kappa_;
  int order_;
  double albedo_;
  std::vector<double> matrix_;
};

/// The three operators (orders 1, 3, 5) for one absorption coefficient,
/// assembled together so the E_m tables at node separations are shared.
class KernelFamily {
 public:
  KernelFamily(const Grid1D& grid, double kappa, double albedo);

  const KernelOperator& order(int n) const;
  const KernelOperator& first() const { return ops_[0]; }
  const KernelOperator& third() const { return ops_[1]; }
  const KernelOperator& fifth() const { return ops_[2]; }

 private:
  std::vector<KernelOperator> ops_;
};

KernelOperator build_kernel(const Grid1D& grid, double kappa, int order, double albedo);

GridFunction apply_kernel(const KernelOperator& op, std::span<const double> values);

enum class SourceKind {
  directional,  ///< I(mu) = |mu| Q on the incoming hemisphere
  isotropic,    ///< I(mu) = Q
  blackbody,    ///< I(mu) = B_nu(T_b); needs the scaled frequency
};

enum class BoundarySide {
  bottom,  ///< tau = 0, upgoing
  top,     ///< tau = Z, downgoing
};

/// Incident intensity prescribed on one face, for one frequency.
struct BoundarySourceSpec {
  SourceKind kind = SourceKind::directional;
  double magnitude = 0.0;  ///< Q, or T_b for blackbody
  BoundarySide side = BoundarySide::bottom;
  double frequency = 0.0;  ///< scaled x, used by blackbody only

  /// Q such that the incident intensity is Q (isotropic) or |mu| Q (directional).
  double intensity_scale() const;
  bool directional() const { return kind == SourceKind::directional; }
};

enum class Moment { zeroth, second };

/// Contribution of an attenuated boundary source to J (zeroth moment) or K
/// (second moment) at every node. A top source also gets the image term from
/// specular ground reflection with the given albedo.
///
///   directional: J = Q/2 E_3(kappa d),  K = Q/2 E_5(kappa d)
///   isotropic:   J = Q/2 E_2(kappa d),  K = Q/2 E_4(kappa d)
GridFunction boundary_attenuation(const Grid1D& grid, double kappa, const BoundarySourceSpec& spec,
                                  double albedo, Moment moment = Moment::zeroth);

/// Same contract as apply_kernel, computed by adaptive tanh-sinh quadrature of
/// each segment (so the log singularity at t = tau_i always sits on an
/// endpoint). Reference implementation for tests and documentation.
/// Throws NumericError naming the worst node when the error estimate exceeds tol.
GridFunction brute_force_kernel(const Grid1D& grid, double kappa, int order, double albedo,
                                std::span<const double> values, double tol);

}  // namespace stratrt
