#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stratrt {

/// Nodes tau_0 = 0 < tau_1 < ... < tau_N = Z in optical-depth units.
class Grid1D {
 public:
  /// Throws ArgumentError unless nodes start at 0, increase strictly and N >= 2.
  explicit Grid1D(std::vector<double> nodes);

  /// N equal intervals on [0, depth].
  static Grid1D uniform(double depth, std::size_t intervals);

  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t intervals() const { return nodes_.size() - 1; }
  double depth() const { return nodes_.back(); }
  double spacing(std::size_t k) const { return nodes_[k + 1] - nodes_[k]; }

  /// Trapezoid weights; exact for piecewise-linear grid functions.
  std::vector<double> trapezoid_weights() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  std::vector<double> nodes_;
};

/// Samples aligned with the nodes of a Grid1D.
using GridFunction = std::vector<double>;

/// Throws ArgumentError if `values` does not match the grid or holds non-finite entries.
void check_grid_function(const Grid1D& grid, std::span<const double> values,
                         const char* what);

}  // namespace stratrt
