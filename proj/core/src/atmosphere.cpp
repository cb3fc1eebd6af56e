#include "stratrt/atmosphere.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "stratrt/error.hpp"
#include "stratrt/frequency_grid.hpp"

namespace stratrt {

namespace {

constexpr double kKappaFloor = 1e-6;
constexpr std::size_t kFineSamples = 20000;
// Frequency range relative to the ground temperature.
constexpr double kRangeLow = 1.0 / 50.0;
constexpr double kRangeHigh = 25.0;
// Used for the frequency range when there is no sunlight to set T_g.
constexpr double kFallbackTemperature = 0.3;

double reference_temperature(const Scenario& s) {
  const double tg = s.ground_temperature();
  return tg > 0.0 ? tg : kFallbackTemperature;
}

}  // namespace

void Scenario::validate() const {
  std::ostringstream err;
  auto fraction = [&](const char* name, double v) {
    if (!(v >= 0.0 && v < 1.0)) err << "\n  " << name << " must lie in [0, 1), got " << v;
  };
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) err << "\n  " << name << " must be positive, got " << v;
  };
  positive("thickness_km", thickness_km);
  if (!(solar_power_scaled >= 0.0) || !std::isfinite(solar_power_scaled)) {
    err << "\n  solar_power_scaled must be finite and >= 0";
  }
  fraction("ground_direct_fraction", ground_direct_fraction);
  fraction("ground_albedo", ground_albedo);
  fraction("high_altitude_source_fraction", high_altitude_source_fraction);
  fraction("cloud_albedo", cloud_albedo);
  fraction("rayleigh_albedo", rayleigh_albedo);
  if (!(cloud_base_km >= 0.0 && cloud_base_km <= cloud_top_km)) {
    err << "\n  need 0 <= cloud_base_km <= cloud_top_km";
  }
  if (!(rayleigh_base_km >= 0.0)) err << "\n  rayleigh_base_km must be >= 0";
  positive("kappa_mean", kappa_mean);
  positive("density_rho0", density_rho0);
  positive("scale_height_km", scale_height_km);
  positive("sun_temperature", sun_temperature);
  if (n_depth < 2) err << "\n  n_depth must be >= 2";
  if (n_freq < 2) err << "\n  n_freq must be >= 2";
  if (max_iters < 1) err << "\n  max_iters must be >= 1";
  positive("tol", tol);
  const std::string msg = err.str();
  if (!msg.empty()) throw ValidationError("invalid scenario:" + msg);
}

double Scenario::ground_temperature() const {
  const double absorbed = (1.0 - ground_albedo) * ground_direct_fraction * solar_power_scaled;
  return std::pow(absorbed, 0.25) * sun_temperature;
}

AltitudeMap::AltitudeMap(double rho0, double scale_height_km, double top_km)
    : rho0_(rho0), H_(scale_height_km), top_km_(top_km) {
  if (!(rho0 > 0.0) || !(scale_height_km > 0.0) || !(top_km > 0.0)) {
    throw ArgumentError("AltitudeMap: rho0, scale height and top must be positive");
  }
  Z_ = tau(top_km);
}

double AltitudeMap::tau(double z_km) const { return -rho0_ * std::expm1(-z_km / H_); }

double AltitudeMap::z(double tau) const {
  if (!(tau >= 0.0 && tau < rho0_)) throw DomainError("AltitudeMap::z: tau outside [0, rho0)");
  return -H_ * std::log1p(-tau / rho0_);
}

AltitudeMap altitude_map(const Scenario& s) {
  return AltitudeMap(s.density_rho0, s.scale_height_km, s.thickness_km);
}

Grid1D scenario_grid(const Scenario& s) {
  return Grid1D::uniform(altitude_map(s).depth(), s.n_depth);
}

Spectrum build_spectrum(const TransmittanceTable& table, const Scenario& scenario,
                        const PhysicalScales& scales) {
  if (table.size() == 0) throw ArgumentError("build_spectrum: empty transmittance table");
  table.validate();
  scenario.validate();

  const double Tr = reference_temperature(scenario);
  const double u_lo = std::log(kRangeLow * Tr);
  const double u_hi = std::log(kRangeHigh * Tr);
  auto kappa_raw = [&](double x) {
    return std::max(kKappaFloor, -std::log(table.at(scales.x_to_wavelength_um(x))));
  };

  // Fine grid in ln x: raw kappa, Planck-weighted mean, node density.
  const std::size_t M = kFineSamples;
  const double du = (u_hi - u_lo) / static_cast<double>(M - 1);
  std::vector<double> xs(M), ks(M);
  for (std::size_t k = 0; k < M; ++k) {
    xs[k] = std::exp(u_lo + du * static_cast<double>(k));
    ks[k] = kappa_raw(xs[k]);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const double w = ((k == 0 || k == M - 1) ? 0.5 : 1.0) * xs[k] * planck(xs[k], Tr);
    num += w * ks[k];
    den += w;
  }
  const double scale = scenario.kappa_mean / (num / den);

  std::vector<double> cdf(M, 0.0);
  for (std::size_t k = 1; k < M; ++k) {
    const double dk = std::abs(ks[k] - ks[k - 1]) * scale;
    cdf[k] = cdf[k - 1] + du + dk;
  }

  const std::size_t F = scenario.n_freq;
  std::vector<double> x(F);
  x.front() = xs.front();
  x.back() = xs.back();
  for (std::size_t f = 1; f + 1 < F; ++f) {
    const double level = cdf.back() * static_cast<double>(f) / static_cast<double>(F - 1);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), level);
    const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, M - 1);
    const double t = (level - cdf[k - 1]) / (cdf[k] - cdf[k - 1]);
    x[f] = std::exp(u_lo + du * (static_cast<double>(k - 1) + t));
  }
  for (std::size_t f = 1; f < F; ++f) {
    if (!(x[f] > x[f - 1])) throw NumericError("build_spectrum: node placement collapsed");
  }

  Spectrum s;
  s.x = x;
  s.weights = log_trapezoid_weights(x);
  s.kappa.resize(F);
  for (std::size_t f = 0; f < F; ++f) s.kappa[f] = kappa_raw(x[f]) * scale;
  s.kappa_max = *std::max_element(s.kappa.begin(), s.kappa.end());

  const AltitudeMap map = altitude_map(scenario);
  const Grid1D grid = scenario_grid(scenario);
  const std::size_t n = grid.size();
  s.depth_nodes = n;
  std::vector<double> a_iso(n, 0.0), a_ray(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = std::min(map.z(grid[i]), scenario.thickness_km);
    if (z >= scenario.cloud_base_km && z <= scenario.cloud_top_km) a_iso[i] = scenario.cloud_albedo;
    if (z > scenario.rayleigh_base_km) a_ray[i] = scenario.rayleigh_albedo;
  }
  const bool any_iso = std::any_of(a_iso.begin(), a_iso.end(), [](double a) { return a > 0.0; });
  const bool any_ray = std::any_of(a_ray.begin(), a_ray.end(), [](double a) { return a > 0.0; });
  if (any_iso) {
    s.albedo_iso.reserve(F * n);
    for (std::size_t f = 0; f < F; ++f) s.albedo_iso.insert(s.albedo_iso.end(), a_iso.begin(), a_iso.end());
  }
  if (any_ray) {
    s.albedo_ray.reserve(F * n);
    for (std::size_t f = 0; f < F; ++f) s.albedo_ray.insert(s.albedo_ray.end(), a_ray.begin(), a_ray.end());
  }
  s.validate();
  return s;
}

Spectrum block_window(const Spectrum& base, double lo, double hi, double blocked_kappa) {
  if (!(blocked_kappa > 0.0) || !std::isfinite(blocked_kappa)) {
    throw ArgumentError("block_window: blocked kappa must be positive");
  }
  Spectrum s = base;
  for (std::size_t f : window_nodes(base, lo, hi)) s.kappa[f] = blocked_kappa;
  s.kappa_max = *std::max_element(s.kappa.begin(), s.kappa.end());
  return s;
}

std::vector<std::size_t> window_nodes(const Spectrum& spectrum, double lo, double hi) {
  std::vector<std::size_t> idx;
  for (std::size_t f = 0; f < spectrum.size(); ++f) {
    if (spectrum.x[f] >= lo && spectrum.x[f] < hi) idx.push_back(f);
  }
  return idx;
}

SpectralSources scenario_sources(const Scenario& scenario, const Spectrum& spectrum) {
  const std::size_t F = spectrum.size();
  SpectralSources src;
  src.bottom.resize(F);
  src.top.resize(F);
  const double tg = scenario.ground_temperature();
  const double q_high = scenario.high_altitude_source_fraction * scenario.solar_power_scaled;
  for (std::size_t f = 0; f < F; ++f) {
    const double x = spectrum.x[f];
    src.bottom[f] = BoundarySourceSpec{SourceKind::blackbody, tg, BoundarySide::bottom, x};
    src.top[f] = BoundarySourceSpec{SourceKind::directional,
                                    q_high * planck(x, scenario.sun_temperature),
                                    BoundarySide::top, x};
  }
  return src;
}

AtmosphereResult run_scenario(const Scenario& scenario, const Spectrum& spectrum, int threads,
                              const PhysicalScales& scales) {
  scenario.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const AltitudeMap map = altitude_map(scenario);
  const Grid1D grid = scenario_grid(scenario);
  if (spectrum.scattering() && spectrum.depth_nodes != grid.size()) {
    throw ArgumentError("run_scenario: spectrum albedos do not match n_depth");
  }

  const SpectralProblem problem(spectrum, grid, scenario_sources(scenario, spectrum),
                                scenario.ground_albedo, threads);
  SolverControls controls;
  controls.tol = scenario.tol;
  controls.max_iters = scenario.max_iters;
  controls.threads = threads;
  SpectralResult run = solve_spectral(problem, controls);

  AtmosphereResult out;
  const std::size_t n = grid.size();
  out.tau.assign(grid.nodes().begin(), grid.nodes().end());
  out.z_km.resize(n);
  out.T_kelvin.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.z_km[i] = std::min(map.z(out.tau[i]), scenario.thickness_km);
    out.T_kelvin[i] = scales.scaled_to_kelvin(run.T[i]);
  }
  out.z_km.back() = scenario.thickness_km;
  out.T = std::move(run.T);
  out.x = spectrum.x;
  out.kappa = spectrum.kappa;
  out.J_top.resize(spectrum.size());
  for (std::size_t f = 0; f < spectrum.size(); ++f) out.J_top[f] = run.state.J_at(f, n - 1);
  out.report = std::move(run.report);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

GreenhouseComparison greenhouse_compare(const Scenario& scenario, const Spectrum& base, double lo,
                                        double hi, double blocked_kappa, int threads) {
  if (!(lo <= hi)) throw ArgumentError("greenhouse_compare: window needs lo <= hi");
  if (base.size() == 0 || lo < base.x.front() || hi > base.x.back()) {
    throw ArgumentError("greenhouse_compare: window lies outside the frequency range");
  }
  GreenhouseComparison cmp;
  cmp.window = window_nodes(base, lo, hi);
  const Spectrum blocked = block_window(base, lo, hi, blocked_kappa);
  cmp.base = run_scenario(scenario, base, threads);
  cmp.blocked = run_scenario(scenario, blocked, threads);
  const std::size_t n = cmp.base.T.size();
  cmp.delta_T.resize(n);
  for (std::size_t i = 0; i < n; ++i) cmp.delta_T[i] = cmp.blocked.T[i] - cmp.base.T[i];
  cmp.ground_warming = cmp.delta_T.front() > 0.0;
  cmp.outgoing_reduced = !cmp.window.empty();
  for (std::size_t f : cmp.window) {
    if (!(cmp.blocked.J_top[f] < cmp.base.J_top[f])) cmp.outgoing_reduced = false;
  }
  return cmp;
}

Sensitivity sensitivity(const Scenario& scenario, const Spectrum& spectrum, double rel_step,
                        int threads) {
  if (!(rel_step > 0.0 && rel_step < 1.0)) {
    throw ArgumentError("sensitivity: rel_step must lie in (0, 1)");
  }
  const double T0 = run_scenario(scenario, spectrum, threads).T.front();
  auto step_of = [&](double v) { return v > 0.0 ? rel_step * v : rel_step; };

  Sensitivity out;
  Scenario q = scenario;
  const double dq = step_of(q.high_altitude_source_fraction);
  q.high_altitude_source_fraction += dq;
  out.dT0_dQminus = (run_scenario(q, spectrum, threads).T.front() - T0) / dq;

  Scenario a = scenario;
  const double da = step_of(a.ground_albedo);
  a.ground_albedo += da;
  out.dT0_dalbedo = (run_scenario(a, spectrum, threads).T.front() - T0) / da;
  return out;
}

}  // namespace stratrt
