#include <boost/math/special_functions/legendre.hpp>
#include <algorithm>
#include <cmath>
#include <string>

#include "stratrt/error.hpp"
#include "stratrt/parallel.hpp"
#include "stratrt/spectral.hpp"

namespace stratrt {

namespace {

// Weights for a linear source across one segment of optical width delta = c h,
// seen from the end of the segment the ray arrives at:
//   int_0^h c e^{-c v} S dv = S_start * a1 + S_end * (a0 - a1),
// with v measured back from the arrival point.
struct SegmentWeights {
  double attenuation;
  double a0;
  double a1;
};

SegmentWeights segment_weights(double delta) {
  SegmentWeights w;
  w.attenuation = std::exp(-delta);
  w.a0 = -std::expm1(-delta);
  if (delta < 0.1) {
    // a1 = sum_{m>=2} (-1)^m (m-1) delta^{m-1} / m!
    double term = 1.0;  // delta^{m-1} / m! at m = 1
    double sum = 0.0;
    for (int m = 2; m <= 16; ++m) {
      term *= delta / m;
      sum += ((m % 2 == 0) ? 1.0 : -1.0) * (m - 1) * term;
    }
    w.a1 = sum;
  } else {
    w.a1 = (w.a0 - delta * w.attenuation) / delta;
  }
  return w;
}

double incident(const BoundarySourceSpec& s, double mu_abs) {
  const double q = s.intensity_scale();
  return s.directional() ? mu_abs * q : q;
}

}  // namespace

double IntensityTable::moment(std::size_t f, std::size_t i, int power) const {
  double s = 0.0;
  for (std::size_t m = 0; m < mu.size(); ++m) {
    s += mu_weights[m] * std::pow(mu[m], power) * at(f, i, m);
  }
  return 0.5 * s;
}

void gauss_directions(std::size_t per_hemisphere, std::vector<double>& mu,
                      std::vector<double>& weights) {
  if (per_hemisphere < 1) throw ArgumentError("gauss_directions: need at least one node");
  const int n = static_cast<int>(per_hemisphere);
  // Nonnegative zeros of P_n; the rule on [-1, 1] is symmetric.
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> x, w;
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double wz = 2.0 / ((1.0 - z * z) * dp * dp);
    x.push_back(z);
    w.push_back(wz);
    if (z != 0.0) {
      x.push_back(-z);
      w.push_back(wz);
    }
  }
  // Map [-1, 1] onto (0, 1) for the upward hemisphere; mirror for downward.
  std::vector<double> up_mu, up_w;
  for (std::size_t k = 0; k < x.size(); ++k) {
    up_mu.push_back(0.5 * (1.0 + x[k]));
    up_w.push_back(0.5 * w[k]);
  }
  std::vector<std::size_t> order(up_mu.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return up_mu[a] < up_mu[b]; });

  mu.clear();
  weights.clear();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    mu.push_back(-up_mu[*it]);
    weights.push_back(up_w[*it]);
  }
  for (std::size_t k : order) {
    mu.push_back(up_mu[k]);
    weights.push_back(up_w[k]);
  }
}

IntensityTable recover_intensity(const SpectralProblem& problem, const RadiationState& state,
                                 std::span<const double> T, std::span<const double> mu,
                                 std::span<const double> mu_weights, RayleighVariant variant) {
  const Spectrum& sp = problem.spectrum();
  const Grid1D& grid = problem.grid();
  const std::size_t F = sp.size();
  const std::size_t n = grid.size();
  const std::size_t M = mu.size();
  if (mu_weights.size() != M) throw ArgumentError("recover_intensity: weights do not match mu");
  for (double m : mu) {
    if (!(std::abs(m) <= 1.0) || m == 0.0) {
      throw ArgumentError("recover_intensity: directions must lie in [-1, 1] without 0");
    }
  }
  check_grid_function(grid, T, "recover_intensity temperature");
  if (state.frequencies != F || state.nodes != n) {
    throw ArgumentError("recover_intensity: state shape does not match the problem");
  }

  // For each upward direction find its downward mirror for the ground reflection.
  std::vector<std::ptrdiff_t> mirror(M, -1);
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = 0; b < M; ++b) {
      if (mu[b] == -mu[a]) mirror[a] = static_cast<std::ptrdiff_t>(b);
    }
  }
  const double alpha = problem.ground_albedo();

  IntensityTable table;
  table.frequencies = F;
  table.nodes = n;
  table.mu.assign(mu.begin(), mu.end());
  table.mu_weights.assign(mu_weights.begin(), mu_weights.end());
  table.values.assign(F * n * M, 0.0);

  parallel_for(F, problem.threads(), [&](std::size_t f) {
    std::vector<double> s0(n), s2(n), S(n);
    problem.source_terms(state, T, f, variant, s0, s2);
    const double kappa = sp.kappa[f];
    auto cell = [&](std::size_t i, std::size_t m) -> double& {
      return table.values[(f * n + i) * M + m];
    };

    // Downward rays first, so upward rays can pick up the reflected part.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t m = 0; m < M; ++m) {
        const bool down = mu[m] < 0.0;
        if (down != (pass == 0)) continue;
        const double a = std::abs(mu[m]);
        const double mu2 = mu[m] * mu[m];
        for (std::size_t i = 0; i < n; ++i) S[i] = s0[i] + mu2 * s2[i];
        const double c = kappa / a;
        if (down) {
          cell(n - 1, m) = incident(problem.sources().top[f], a);
          for (std::size_t i = n - 1; i-- > 0;) {
            const SegmentWeights w = segment_weights(c * grid.spacing(i));
            cell(i, m) = cell(i + 1, m) * w.attenuation + S[i + 1] * w.a1 + S[i] * (w.a0 - w.a1);
          }
        } else {
          double start = incident(problem.sources().bottom[f], a);
          if (alpha > 0.0) {
            if (mirror[m] < 0) {
              throw ArgumentError("recover_intensity: ground reflection needs mirrored directions");
            }
            start += alpha * cell(0, static_cast<std::size_t>(mirror[m]));
          }
          cell(0, m) = start;
          for (std::size_t i = 1; i < n; ++i) {
            const SegmentWeights w = segment_weights(c * grid.spacing(i - 1));
            cell(i, m) = cell(i - 1, m) * w.attenuation + S[i - 1] * w.a1 + S[i] * (w.a0 - w.a1);
          }
        }
      }
    }
  });
  return table;
}

IntensityTable recover_intensity(const SpectralProblem& problem, const RadiationState& state,
                                 std::span<const double> T, std::size_t per_hemisphere) {
  std::vector<double> mu, w;
  gauss_directions(per_hemisphere, mu, w);
  return recover_intensity(problem, state, T, mu, w);
}

GridFunction flux_profile(const Spectrum& spectrum, const IntensityTable& table) {
  if (table.frequencies != spectrum.size()) {
    throw ArgumentError("flux_profile: table does not match the spectrum");
  }
  GridFunction flux(table.nodes, 0.0);
  for (std::size_t i = 0; i < table.nodes; ++i) {
    CompensatedSum s;
    for (std::size_t f = 0; f < table.frequencies; ++f) {
      double inner = 0.0;
      for (std::size_t m = 0; m < table.mu.size(); ++m) {
        inner += table.mu_weights[m] * table.mu[m] * table.at(f, i, m);
      }
      s.add(spectrum.weights[f] * inner);
    }
    flux[i] = s.value();
  }
  return flux;
}

}  // namespace stratrt
