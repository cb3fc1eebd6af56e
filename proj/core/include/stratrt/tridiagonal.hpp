#pragma once

#include <span>
#include <vector>

namespace stratrt {

/// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored. Throws NumericError on a zero pivot.
/// Stable without pivoting for diagonally dominant systems, which is all the
/// reaction-diffusion discretizations here produce.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

}  // namespace stratrt
