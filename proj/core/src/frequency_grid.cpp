#include "stratrt/frequency_grid.hpp"

#include <cmath>

#include "stratrt/error.hpp"
#include "stratrt/parallel.hpp"
#include "stratrt/specfun.hpp"

namespace stratrt {

FrequencyGrid log_frequency_grid(double x_lo, double x_hi, std::size_t n) {
  if (!(x_lo > 0.0) || !(x_hi > x_lo)) {
    throw ArgumentError("log_frequency_grid: need 0 < x_lo < x_hi");
  }
  if (n < 2) throw ArgumentError("log_frequency_grid: need at least two nodes");
  FrequencyGrid g;
  g.x.resize(n);
  const double u0 = std::log(x_lo);
  const double du = (std::log(x_hi) - u0) / static_cast<double>(n - 1);
  for (std::size_t f = 0; f < n; ++f) g.x[f] = std::exp(u0 + du * static_cast<double>(f));
  g.x.front() = x_lo;
  g.x.back() = x_hi;
  g.weights = log_trapezoid_weights(g.x);
  return g;
}

std::vector<double> log_trapezoid_weights(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) throw ArgumentError("log_trapezoid_weights: need at least two nodes");
  std::vector<double> w(n, 0.0);
  for (std::size_t f = 0; f + 1 < n; ++f) {
    if (!(x[f] > 0.0) || !(x[f + 1] > x[f])) {
      throw ArgumentError("log_trapezoid_weights: nodes must be positive and increasing");
    }
    const double du = std::log(x[f + 1] / x[f]);
    w[f] += 0.5 * du * x[f];
    w[f + 1] += 0.5 * du * x[f + 1];
  }
  return w;
}

double grid_stefan_constant(const FrequencyGrid& grid, double T) {
  if (!(T > 0.0)) throw DomainError("grid_stefan_constant: T must be positive");
  CompensatedSum s;
  for (std::size_t f = 0; f < grid.x.size(); ++f) s.add(grid.weights[f] * planck(grid.x[f], T));
  return s.value() / (T * T * T * T);
}

double stefan_relative_error(const FrequencyGrid& grid, double T) {
  return std::abs(grid_stefan_constant(grid, T) / kScaledStefan - 1.0);
}

}  // namespace stratrt
