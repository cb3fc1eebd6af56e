#pragma once

#include <cstddef>
#include <vector>

namespace stratrt {

/// Scaled-frequency nodes with positive quadrature weights.
struct FrequencyGrid {
  std::vector<double> x;
  std::vector<double> weights;
};

/// n nodes equally spaced in u = ln x on [x_lo, x_hi] with trapezoid weights
/// in u (w = x du). The Planck integrand decays at both ends of a wide range,
/// so the rule converges spectrally there.
FrequencyGrid log_frequency_grid(double x_lo, double x_hi, std::size_t n);

/// Trapezoid weights in u = ln x for arbitrary increasing nodes.
std::vector<double> log_trapezoid_weights(const std::vector<double>& x);

/// sum_f w_f B(x_f, T) / T^4, the grid's own Stefan constant at temperature T.
double grid_stefan_constant(const FrequencyGrid& grid, double T);

/// |grid_stefan_constant / (pi^4/15) - 1|.
double stefan_relative_error(const FrequencyGrid& grid, double T);

}  // namespace stratrt
