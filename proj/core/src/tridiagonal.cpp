#include "stratrt/tridiagonal.hpp"

#include <cmath>
#include <string>

#include "stratrt/error.hpp"

namespace stratrt {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw ArgumentError("solve_tridiagonal: inconsistent band lengths");
  }
  std::vector<double> c(n), x(n);
  double beta = diag[0];
  if (beta == 0.0) throw NumericError("solve_tridiagonal: zero pivot at row 0");
  c[0] = n > 1 ? upper[0] / beta : 0.0;
  x[0] = rhs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    beta = diag[i] - lower[i] * c[i - 1];
    if (beta == 0.0 || !std::isfinite(beta)) {
      throw NumericError("solve_tridiagonal: zero pivot at row " + std::to_string(i));
    }
    c[i] = (i + 1 < n) ? upper[i] / beta : 0.0;
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace stratrt
