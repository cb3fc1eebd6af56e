#include "stratrt/grid.hpp"

#include <cmath>
#include <string>

#include "stratrt/error.hpp"

namespace stratrt {

Grid1D::Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw ArgumentError("Grid1D: need at least two intervals");
  if (nodes_.front() != 0.0) throw ArgumentError("Grid1D: first node must be 0");
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    if (!std::isfinite(nodes_[k + 1]) || !(nodes_[k + 1] > nodes_[k])) {
      throw ArgumentError("Grid1D: nodes must be finite and strictly increasing (at index " +
                          std::to_string(k + 1) + ")");
    }
  }
}

Grid1D Grid1D::uniform(double depth, std::size_t intervals) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw ArgumentError("Grid1D: depth must be positive");
  }
  if (intervals < 2) throw ArgumentError("Grid1D: need at least two intervals");
  std::vector<double> nodes(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    nodes[i] = depth * static_cast<double>(i) / static_cast<double>(intervals);
  }
  nodes.back() = depth;
  return Grid1D(std::move(nodes));
}

std::vector<double> Grid1D::trapezoid_weights() const {
  std::vector<double> w(nodes_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    const double h = spacing(k);
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

void check_grid_function(const Grid1D& grid, std::span<const double> values,
                         const char* what) {
  if (values.size() != grid.size()) {
    throw ArgumentError(std::string(what) + ": length " + std::to_string(values.size()) +
                        " does not match grid size " + std::to_string(grid.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ArgumentError(std::string(what) + ": non-finite value");
  }
}

}  // namespace stratrt
