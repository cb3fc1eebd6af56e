#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stratrt/frequency_grid.hpp"
#include "stratrt/grid.hpp"
#include "stratrt/kernels.hpp"

namespace stratrt {

/// How Rayleigh scattering enters the isotropic part of the source.
enum class RayleighVariant {
  /// p = 3/8 (3 - mu^2 - mu'^2 + 3 mu^2 mu'^2), normalized so that
  /// (1/2) int p dmu' = 1: S0 gains a_r (9/8 J - 3/8 K).
  normalized,
  /// The historical coefficient -9/8 on K in S0. Kept for comparison only;
  /// it does not conserve flux.
  legacy_h0,
};

/// Medium description on a frequency grid. Albedos are sampled per
/// (frequency, depth node) and stored row-major by frequency; empty albedo
/// vectors mean a non-scattering medium.
struct Spectrum {
  std::vector<double> x;        ///< increasing scaled frequencies
  std::vector<double> weights;  ///< positive quadrature weights
  std::vector<double> kappa;    ///< absorption per unit optical depth, in (0, kappa_max]
  double kappa_max = 0.0;
  std::size_t depth_nodes = 0;
  std::vector<double> albedo_iso;
  std::vector<double> albedo_ray;

  std::size_t size() const { return x.size(); }
  bool scattering() const { return !albedo_iso.empty() || !albedo_ray.empty(); }
  double a_iso(std::size_t f, std::size_t i) const {
    return albedo_iso.empty() ? 0.0 : albedo_iso[f * depth_nodes + i];
  }
  double a_ray(std::size_t f, std::size_t i) const {
    return albedo_ray.empty() ? 0.0 : albedo_ray[f * depth_nodes + i];
  }
  double albedo(std::size_t f, std::size_t i) const { return a_iso(f, i) + a_ray(f, i); }

  /// Throws ValidationError on broken invariants: sizes, ordering,
  /// 0 < kappa <= kappa_max, weights > 0, 0 <= a_iso + a_ray < 1.
  void validate() const;

  /// Non-scattering spectrum with a constant kappa; kappa_max = kappa0.
  static Spectrum constant(const FrequencyGrid& grid, double kappa0, std::size_t depth_nodes);
};

/// J and K on the (frequency x depth) grid, row-major by frequency.
struct RadiationState {
  std::size_t frequencies = 0;
  std::size_t nodes = 0;
  std::vector<double> J;
  std::vector<double> K;

  static RadiationState zeros(std::size_t frequencies, std::size_t nodes);
  std::span<const double> J_row(std::size_t f) const {
    return std::span<const double>(J).subspan(f * nodes, nodes);
  }
  std::span<const double> K_row(std::size_t f) const {
    return std::span<const double>(K).subspan(f * nodes, nodes);
  }
  std::span<double> J_row(std::size_t f) { return std::span<double>(J).subspan(f * nodes, nodes); }
  std::span<double> K_row(std::size_t f) { return std::span<double>(K).subspan(f * nodes, nodes); }
  double J_at(std::size_t f, std::size_t i) const { return J[f * nodes + i]; }
  double K_at(std::size_t f, std::size_t i) const { return K[f * nodes + i]; }
};

/// Temperatures (scaled) at the depth nodes.
using TemperatureProfile = GridFunction;

/// Incident intensities, one specification per frequency on each face.
/// The `side` field of each entry is overridden by the vector it lives in.
struct SpectralSources {
  std::vector<BoundarySourceSpec> bottom;
  std::vector<BoundarySourceSpec> top;

  static SpectralSources none(std::size_t frequencies);
  /// Isotropic blackbody radiation at T_bottom from below and T_top from above.
  static SpectralSources blackbody(const Spectrum& spectrum, double T_bottom, double T_top);

  void validate(std::size_t frequencies) const;
  /// (1/2) sum_f w_f int_0^1 (Q+ + Q-) mu dmu, the bound on the first iterate.
  double bound(const Spectrum& spectrum) const;
};

struct IterationReport {
  std::vector<double> sup_dT;
  std::vector<double> min_dT;
  std::vector<double> min_dJ;
  std::vector<double> min_dK;
  std::vector<double> source_norm;  ///< sum_f w_f kappa_f int_0^Z J_f dtau
  std::vector<double> ratio;        ///< successive source-norm increment ratios, 0 when undefined
  int iterations = 0;
  bool converged = false;
  bool monotone = true;       ///< every recorded min increment >= -1e-10
  bool moments_ordered = true;  ///< 0 <= K <= J held at every iterate
  double source_bound = 0.0;  ///< the first-iterate bound Q
  double contraction = 0.0;   ///< C_1(kappa_max, Z)
};

struct SolverControls {
  double tol = 1e-8;
  int max_iters = 22;
  int threads = 1;  ///< 0 = STRATRT_THREADS or hardware concurrency
  RayleighVariant rayleigh = RayleighVariant::normalized;
};

/// A spectrum on a depth grid with its boundary data and ground albedo. Builds
/// the kernel family and boundary terms of every frequency once (in parallel
/// over frequencies); afterwards immutable.
class SpectralProblem {
 public:
  SpectralProblem(Spectrum spectrum, Grid1D grid, SpectralSources sources, double ground_albedo,
                  int threads = 1);

  const Spectrum& spectrum() const { return spectrum_; }
  const Grid1D& grid() const { return grid_; }
  const SpectralSources& sources() const { return sources_; }
  double ground_albedo() const { return alpha_; }
  unsigned threads() const { return threads_; }
  const KernelFamily& kernels(std::size_t f) const { return families_[f]; }
  std::span<const double> boundary_J(std::size_t f) const { return bnd_J_[f]; }
  std::span<const double> boundary_K(std::size_t f) const { return bnd_K_[f]; }

  /// S0 and S2 of the source S0 + mu^2 S2 at frequency f (without kappa).
  void source_terms(const RadiationState& state, std::span<const double> T, std::size_t f,
                    RayleighVariant variant, std::span<double> s0, std::span<double> s2) const;

  double source_norm(const RadiationState& state) const;
  double contraction() const;

 private:
  Spectrum spectrum_;
  Grid1D grid_;
  SpectralSources sources_;
  double alpha_;
  unsigned threads_;
  std::vector<KernelFamily> families_;
  std::vector<GridFunction> bnd_J_;
  std::vector<GridFunction> bnd_K_;
};

/// Rayleigh phase function 3/8 (3 - mu^2 - mu'^2 + 3 mu^2 mu'^2).
/// Throws ArgumentError outside [-1, 1]^2.
double rayleigh_phase(double mu, double mu_prime);

/// One transport sweep: J^{n+1} = b_J + K_1 S0 + K_3 S2, K^{n+1} = b_K + K_3 S0 + K_5 S2.
RadiationState moments_update(const SpectralProblem& problem, const RadiationState& state,
                              std::span<const double> T,
                              RayleighVariant variant = RayleighVariant::normalized);

/// Per node, the T >= 0 with sum_f w kappa (1-a) B(x_f, T) = sum_f w kappa (1-a) J_f.
/// `hint` (may be empty) seeds the bracket [0, max(1, max hint)], doubled
/// as needed. Throws NumericError if 60 doublings do not bracket the root.
TemperatureProfile temperature_update(const Spectrum& spectrum, const RadiationState& state,
                                      std::span<const double> hint = {}, unsigned threads = 1);

struct SpectralResult {
  RadiationState state;
  TemperatureProfile T;
  IterationReport report;
};

using IterationObserver =
    std::function<void(int, const RadiationState&, const TemperatureProfile&)>;

/// From T = 0, J = K = 0 alternate moments_update and temperature_update until
/// the sup increment of T is <= tol or max_iters is reached.
SpectralResult solve_spectral(const SpectralProblem& problem, const SolverControls& controls,
                              const IterationObserver& observer = {});
SpectralResult solve_spectral(const Spectrum& spectrum, const Grid1D& grid,
                              const SpectralSources& sources, double ground_albedo,
                              const SolverControls& controls);

/// I_f(tau_i, mu_m) for signed directions mu_m != 0.
struct IntensityTable {
  std::size_t frequencies = 0;
  std::size_t nodes = 0;
  std::vector<double> mu;
  std::vector<double> mu_weights;  ///< quadrature over [-1, 1]
  std::vector<double> values;

  double at(std::size_t f, std::size_t i, std::size_t m) const {
    return values[(f * nodes + i) * mu.size() + m];
  }
  /// (1/2) sum_m w_m mu_m^power I.
  double moment(std::size_t f, std::size_t i, int power) const;
};

/// Gauss-Legendre directions, `per_hemisphere` on each side of mu = 0.
void gauss_directions(std::size_t per_hemisphere, std::vector<double>& mu,
                      std::vector<double>& weights);

/// Integrates the transfer equation along each direction with the source
/// rebuilt from (state, T), using exact segment integrals of the exponential
/// against piecewise-linear sources, so small |mu| stays finite.
IntensityTable recover_intensity(const SpectralProblem& problem, const RadiationState& state,
                                 std::span<const double> T, std::span<const double> mu,
                                 std::span<const double> mu_weights,
                                 RayleighVariant variant = RayleighVariant::normalized);
IntensityTable recover_intensity(const SpectralProblem& problem, const RadiationState& state,
                                 std::span<const double> T, std::size_t per_hemisphere = 32);

/// F(tau_i) = sum_f w_f sum_m w_m mu_m I.
GridFunction flux_profile(const Spectrum& spectrum, const IntensityTable& table);

struct PrincipleViolation {
  std::string quantity;  ///< "T" or "J"
  std::size_t frequency = 0;
  std::size_t node = 0;
  double value = 0.0;
  double bound = 0.0;
};

struct MaxPrincipleReport {
  bool upper_ok = true;
  bool lower_ok = true;
  double max_upper_excess = 0.0;  ///< max(T - T_M, J - B(T_M)), may be negative
  std::vector<PrincipleViolation> violations;
  bool ok() const { return upper_ok && lower_ok; }
};

/// Checks T_m - 1e-8 <= T <= T_M + 1e-8 and B(T_m) - 1e-8 <= J <= B(T_M) + 1e-8.
MaxPrincipleReport max_principle_check(const RadiationState& state, std::span<const double> T,
                                       const Spectrum& spectrum, double T_M, double T_m);

struct RateCheck {
  enum class Status { pass, fail, inconclusive };
  Status status = Status::inconclusive;
  double ratio = 0.0;  ///< fitted tail ratio of source-norm increments
  double bound = 0.0;  ///< C_1 + 0.02
  bool passed() const { return status == Status::pass; }
};

/// Fits the geometric decay of successive source-norm increments over the
/// tail of the run; passes when the ratio is <= C_1 + 0.02. Fewer than five
/// iterations are inconclusive.
RateCheck convergence_rate_check(const IterationReport& report, double C1);

}  // namespace stratrt
