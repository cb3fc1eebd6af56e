#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "stratrt/error.hpp"
#include "stratrt/kernels.hpp"
#include "stratrt/specfun.hpp"

namespace stratrt {

namespace {

// int over s in [near, near + width] of E_n(s) * linear(s), where the linear
// factor goes from h_near at s = near to h_far at the far end. Integrating in
// s keeps the singular endpoint s = 0 exactly representable.
double segment_integral(boost::math::quadrature::tanh_sinh<double>& rule, int order,
                        double near, double width, double h_near, double h_far, double tol,
                        double& error) {
  auto f = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double phi = (s - near) / width;
    return expint(order, s) * (h_near + (h_far - h_near) * phi);
  };
  double err = 0.0;
  double l1 = 0.0;
  const double value = rule.integrate(f, near, near + width, tol, &err, &l1);
  error += err;
  return value;
}

}  // namespace

GridFunction brute_force_kernel(const Grid1D& grid, double kappa, int order, double albedo,
                                std::span<const double> values, double tol) {
  if (!(tol > 0.0)) throw ArgumentError("brute_force_kernel: tol must be positive");
  if (order != 1 && order != 3 && order != 5) {
    throw ArgumentError("brute_force_kernel: order must be 1, 3 or 5");
  }
  if (!(kappa > 0.0)) throw ArgumentError("brute_force_kernel: kappa must be positive");
  if (!(albedo >= 0.0 && albedo < 1.0)) {
    throw ArgumentError("brute_force_kernel: albedo must lie in [0, 1)");
  }
  check_grid_function(grid, values, "brute_force_kernel");

  // integrate() is not const-qualified in older Boost releases.
  boost::math::quadrature::tanh_sinh<double> rule;
  const std::size_t n = grid.size();
  const double rel = std::min(tol, 1e-12);
  GridFunction out(n, 0.0);
  double worst_error = 0.0;
  std::size_t worst_node = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const double tau = grid[i];
    double acc = 0.0;
    double error = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double width = kappa * grid.spacing(k);
      if (k >= i) {
        acc += segment_integral(rule, order, kappa * (grid[k] - tau), width, values[k],
                                values[k + 1], rel, error);
      } else {
        acc += segment_integral(rule, order, kappa * (tau - grid[k + 1]), width, values[k + 1],
                                values[k], rel, error);
      }
      if (albedo > 0.0) {
        double image_error = 0.0;
        acc += albedo * segment_integral(rule, order, kappa * (tau + grid[k]), width, values[k],
                                         values[k + 1], rel, image_error);
        error += albedo * image_error;
      }
    }
    out[i] = 0.5 * acc;
    error *= 0.5;
    if (error > worst_error) {
      worst_error = error;
      worst_node = i;
    }
  }

  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (worst_error > tol * scale) {
    throw NumericError(fmt::format(
        "brute_force_kernel: error estimate {:.3e} exceeds tolerance {:.3e} at node {} (tau = {})",
        worst_error, tol * scale, worst_node, grid[worst_node]));
  }
  return out;
}

}  // namespace stratrt
