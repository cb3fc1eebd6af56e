#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stratrt/grid.hpp"
#include "stratrt/kernels.hpp"

namespace stratrt {

struct BoundaryCondition {
  enum class Type { dirichlet, neumann };
  Type type = Type::neumann;
  double value = 0.0;  ///< Dirichlet value; ignored for a zero-flux condition

  static BoundaryCondition dirichlet(double v) { return {Type::dirichlet, v}; }
  static BoundaryCondition neumann() { return {Type::neumann, 0.0}; }
  bool is_dirichlet() const { return type == Type::dirichlet; }
};

/// Grey lake problem in physical height z in [z_min, z_max], with the sun
/// shining down on z_max:
///
///   -kbar_T T'' + T^4 = T_e^4 + (1/2) int kappa E_1(kappa |s - z|) T(s)^4 ds
///   T_e(z) = (Q/2 E_3(kappa (z_max - z)))^{1/4} T_sun
///
/// With albedo_a > 0 the right-hand side becomes the mean intensity j solving
/// j = T_e^4 + K_1[(1 - a) T^4 + a j].
struct GreyConfig {
  double kappa = 0.1;
  double albedo_a = 0.0;
  double kbar_T = 66.0;
  double Q = 25.0;
  double T_sun = 1.0;
  double z_min = 0.0;
  double z_max = 10.0;
  BoundaryCondition bc_bottom = BoundaryCondition::dirichlet(1.5811388300841898);
  BoundaryCondition bc_top = BoundaryCondition::neumann();
  int outer_iters = 20;
  int inner_iters = 3;  ///< minimum Newton steps per outer iteration
  double tol = 1e-6;

  /// Throws ValidationError on kappa <= 0, a outside [0,1), kbar_T < 0,
  /// tol <= 0, Q or T_sun negative, or an empty z range.
  void validate() const;
};

/// Height offsets z - z_min of `intervals` equal cells on [z_min, z_max]. The
/// kernels act on these offsets with the config's kappa.
Grid1D grey_grid(const GreyConfig& config, std::size_t intervals);

/// Throws ArgumentError for z outside [z_min, z_max].
double equilibrium_temperature(const GreyConfig& config, double z);

/// T_e^4 at the grid nodes.
GridFunction equilibrium_forcing(const GreyConfig& config, const Grid1D& grid);

/// (T^{n+1/2})^4 = T_e^4 + K_1 T^4. Builds the order-1 kernel on every call;
/// the overload taking the operator is what the iteration uses.
GridFunction halfstep_source(const GreyConfig& config, const Grid1D& grid,
                             std::span<const double> T);
GridFunction halfstep_source(const GreyConfig& config, const KernelOperator& k1,
                             std::span<const double> te4, std::span<const double> T);

struct InnerSolveReport {
  int iterations = 0;
  double residual = 0.0;  ///< sup-norm of -kbar_T T'' + T_+^4 - rhs at free nodes
  bool converged = false;
  bool regularized = false;  ///< zero-flux on both ends with T = 0 needed a 1e-12 shift
};

struct InnerControls {
  int min_iters = 3;
  int max_iters = 60;
  double tol = 1e-10;
};

/// Solves -kbar_T T'' + T_+^4 = rhs on the grid nodes with second-order
/// centred differences (ghost reflection for zero-flux ends). Each inner step
/// is a Newton linearization around the previous iterate,
///
///   -kbar_T T''^{m+1} + 4 (T^m_+)^3 T^{m+1} = rhs + 3 (T^m_+)^4,
///
/// solved by the Thomas algorithm. Newton on this convex monotone operator
/// contracts from any start; the frozen-coefficient Picard form does not when
/// kbar_T is large. `initial` seeds the loop; by default rhs^{1/4}.
GridFunction solve_reaction_diffusion_1d(double kbar_T, const Grid1D& grid,
                                         std::span<const double> rhs, BoundaryCondition bottom,
                                         BoundaryCondition top, const InnerControls& controls,
                                         InnerSolveReport* report = nullptr,
                                         std::span<const double> initial = {});

struct GreyReport {
  std::vector<double> sup_increments;
  std::vector<double> min_increments;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;      ///< every min increment >= -1e-10
  bool regularized = false;  ///< some inner solve needed the singular-system shift
  double max_inner_residual = 0.0;
};

struct GreyResult {
  Grid1D grid;         ///< offsets from z_min
  GridFunction z;      ///< physical heights
  GridFunction T_e;
  GridFunction T;
  GreyReport report;
};

/// Algorithm: T^0 = 0, then alternate halfstep_source and the reaction-
/// diffusion solve until sup |T^{n+1} - T^n| <= tol or outer_iters is reached.
/// Non-convergence is reported, not thrown. `observer` sees every iterate.
GreyResult grey_iterate(const GreyConfig& config, const Grid1D& grid,
                        const std::function<void(int, std::span<const double>)>& observer = {});

/// Lake cross-section z_min(x) <= z <= z_max on 0 <= x <= x_max, discretized
/// on a terrain-following grid z = z_max - sigma (z_max - z_min(x)).
struct Terrain2D {
  std::vector<double> x;      ///< increasing, x[0] = 0 is the symmetry axis
  std::vector<double> z_min;  ///< bottom height at each x, below z_max
  double z_max = 10.0;
  std::size_t sigma_intervals = 40;

  /// Throws ValidationError on inconsistent sizes or a column of zero depth.
  void validate() const;
  double depth(std::size_t column) const { return z_max - z_min[column]; }
};

/// Quarter-disc lake: the lower-right quarter of the unit circle stretched
/// by (x, z) -> (30 x, 10 z), with the bottom shifted so z_max = 10. The grid
/// stops at `edge_fraction` of the half-width where the depth vanishes.
Terrain2D quarter_disc_terrain(std::size_t x_intervals, std::size_t sigma_intervals,
                               double edge_fraction = 0.9);

/// Flat-bottom terrain with the given depth range.
Terrain2D flat_terrain(double x_max, double z_min, double z_max, std::size_t x_intervals,
                       std::size_t sigma_intervals);

struct Grey2DResult {
  std::size_t nx = 0;
  std::size_t nsigma = 0;
  std::vector<double> x;  ///< nx * nsigma, row-major by column then sigma
  std::vector<double> z;
  std::vector<double> T_e;
  std::vector<double> T;
  GreyReport report;

  double at(std::size_t column, std::size_t k) const { return T[column * nsigma + k]; }
};

/// 2D lake with radiation coupled only along vertical columns. Dirichlet T = T_e
/// on the bottom curve, zero flux on the surface and on both vertical sides.
/// Bottom and top conditions of `config` are ignored; its z range is replaced
/// by each column's own extent.
Grey2DResult grey_solve_2d(const Terrain2D& terrain, const GreyConfig& config);

}  // namespace stratrt
