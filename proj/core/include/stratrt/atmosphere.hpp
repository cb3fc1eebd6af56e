#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stratrt/grid.hpp"
#include "stratrt/specfun.hpp"
#include "stratrt/spectral.hpp"

namespace stratrt {

/// Transmittance samples t(lambda) over strictly increasing wavelengths in
/// micrometres, 0 < t <= 1.
struct TransmittanceTable {
  std::vector<double> wavelength_um;
  std::vector<double> transmittance;

  std::size_t size() const { return wavelength_um.size(); }
  /// Linear interpolation in wavelength, held constant beyond the end samples.
  double at(double wavelength_um) const;
  void validate() const;
};

/// Two numeric columns separated by a comma (or whitespace). Blank lines and
/// lines starting with '#' are skipped; one non-numeric header line is allowed
/// before the data. Throws ParseError (with the 1-based line) on malformed rows
/// and ValidationError on out-of-range or non-increasing samples.
TransmittanceTable parse_transmittance(std::istream& in, const std::string& source = "<stream>");
TransmittanceTable load_transmittance(const std::filesystem::path& path);

/// Atmosphere run parameters. Heights in km; temperatures scaled by 1e-3.
struct Scenario {
  double thickness_km = 12.0;
  double solar_power_scaled = 3.042e-5;
  double ground_direct_fraction = 0.99;
  double ground_albedo = 0.10;
  double high_altitude_source_fraction = 0.001;
  double cloud_albedo = 0.20;
  double cloud_base_km = 6.0;
  double cloud_top_km = 9.0;
  double rayleigh_albedo = 0.20;
  double rayleigh_base_km = 9.0;
  double kappa_mean = 1.225;
  double density_rho0 = 1.0;
  double scale_height_km = 10.0;
  double sun_temperature = 5.8;
  std::size_t n_depth = 60;  ///< depth intervals; the grid has n_depth + 1 nodes
  std::size_t n_freq = 300;
  int max_iters = 22;
  double tol = 1e-6;

  /// Throws ValidationError with every violated constraint listed.
  void validate() const;

  /// Ground temperature estimate from the absorbed direct sunlight:
  /// ((1 - albedo) direct_fraction P)^{1/4} T_sun.
  double ground_temperature() const;
};

/// tau(z) = rho0 (1 - exp(-z / H)) and its inverse, for z in [0, z_M].
class AltitudeMap {
 public:
  AltitudeMap(double rho0, double scale_height_km, double top_km);

  double tau(double z_km) const;
  double z(double tau) const;
  double depth() const { return Z_; }
  double top_km() const { return top_km_; }

 private:
  double rho0_;
  double H_;
  double top_km_;
  double Z_;
};

AltitudeMap altitude_map(const Scenario& scenario);

/// Depth grid uniform in tau with scenario.n_depth intervals.
Grid1D scenario_grid(const Scenario& scenario);

/// Absorption spectrum from transmittance: kappa = -log t at every node
/// (floored at 1e-6), rescaled so its Planck-weighted mean at the ground
/// temperature equals kappa_mean. Nodes equidistribute 1 + |d kappa / d ln x|
/// over [T_g / 50, 25 T_g]; weights are trapezoidal in ln x. Cloud and
/// Rayleigh albedos are filled per depth node from the node altitude.
Spectrum build_spectrum(const TransmittanceTable& table, const Scenario& scenario,
                        const PhysicalScales& scales = {});

/// Copy of `base` with kappa replaced by `blocked_kappa` for lo <= x < hi.
Spectrum block_window(const Spectrum& base, double lo, double hi, double blocked_kappa);

/// Indices of the nodes with lo <= x < hi.
std::vector<std::size_t> window_nodes(const Spectrum& spectrum, double lo, double hi);

/// Top: directional source, the high-altitude fraction of P B(x, T_sun).
/// Bottom: blackbody ground at scenario.ground_temperature().
SpectralSources scenario_sources(const Scenario& scenario, const Spectrum& spectrum);

struct AtmosphereResult {
  std::vector<double> z_km;
  std::vector<double> tau;
  std::vector<double> T;         ///< scaled
  std::vector<double> T_kelvin;
  std::vector<double> x;
  std::vector<double> kappa;
  std::vector<double> J_top;     ///< J at tau = Z per frequency
  IterationReport report;
  double wall_seconds = 0.0;
};

AtmosphereResult run_scenario(const Scenario& scenario, const Spectrum& spectrum,
                              int threads = 1, const PhysicalScales& scales = {});

struct GreenhouseComparison {
  AtmosphereResult base;
  AtmosphereResult blocked;
  std::vector<double> delta_T;          ///< blocked - base at every depth node
  std::vector<std::size_t> window;      ///< frequency indices that were blocked
  bool ground_warming = false;          ///< delta_T(0) > 0
  bool outgoing_reduced = false;        ///< J(Z) lower at every window node
};

/// Runs the scenario with `base` and with the window blocked. Throws
/// ArgumentError if the window lies outside the frequency range or lo > hi.
GreenhouseComparison greenhouse_compare(const Scenario& scenario, const Spectrum& base,
                                        double lo, double hi, double blocked_kappa,
                                        int threads = 1);

/// One-sided difference quotients of the ground-level temperature.
struct Sensitivity {
  double dT0_dQminus = 0.0;  ///< per unit of high_altitude_source_fraction
  double dT0_dalbedo = 0.0;  ///< per unit of ground_albedo
};

Sensitivity sensitivity(const Scenario& scenario, const Spectrum& spectrum, double rel_step = 0.05,
                        int threads = 1);

}  // namespace stratrt
