#pragma once

#include <numbers>

namespace stratrt {

// Scaled unit system
// ------------------
// Temperatures are carried as kelvin * temperature_scale (1e-3 by default)
// and frequencies as x = h nu / (k * 1000 K), so the Planck exponent is
// exactly x / T. Spectral radiance is expressed in units of
// 2 k^3 (1000 K)^3 / (h^2 c^2), which turns the Planck function into
// x^3 / (e^{x/T} - 1) and the Stefan integral into (pi^4/15) T^4.

/// Physical constants as tabulated for the lake and atmosphere runs.
struct PhysicalScales {
  /// Planck constant h (J s). The tabulated value is the non-reduced
  /// constant; it is the one that enters B_nu = 2 h nu^3 / c^2 / (e^{h nu/kT} - 1).
  double planck_h = 6.6261e-34;
  double light_speed = 2.998e8;    // m/s
  double boltzmann = 1.381e-23;    // J/K
  double stefan_b0 = 1.806657e-8;  // W m^-2 sr^-1 K^-4
  double temperature_scale = 1e-3;

  /// 2 k^4 pi^4 / (15 h^3 c^2) evaluated from the stored constants.
  double stefan_b0_from_constants() const;

  /// Throws ValidationError unless every constant is positive and the stored
  /// B0 agrees with the formula to 1e-4 relative.
  void validate() const;

  /// Scaled frequency x for a vacuum wavelength given in micrometres.
  double wavelength_um_to_x(double wavelength_um) const;
  double x_to_wavelength_um(double x) const;

  double kelvin_to_scaled(double kelvin) const { return kelvin * temperature_scale; }
  double scaled_to_kelvin(double scaled) const { return scaled / temperature_scale; }
};

/// integral_0^inf x^3 / (e^x - 1) dx; the Stefan constant in scaled units.
inline constexpr double kScaledStefan =
    std::numbers::pi * std::numbers::pi * std::numbers::pi * std::numbers::pi / 15.0;

/// Exponential integral E_n(x) = int_0^1 mu^{n-2} e^{-x/mu} dmu.
///
/// Series expansion for x <= 1 and a Lentz continued fraction for x > 1,
/// evaluated independently for each order. E_n(0) = 1/(n-1) for n >= 2.
/// Returns 0 once e^{-x} underflows. Throws DomainError for x < 0, n < 1,
/// or (n, x) = (1, 0).
double expint(int n, double x);

/// int_a^b E_n(s) ds = E_{n+1}(a) - E_{n+1}(b). `b` may be +infinity.
/// Throws ArgumentError when a > b or a < 0.
double expint_segment(int n, double a, double b);

/// Planck function in scaled units: x^3 / (e^{x/T} - 1). Zero at T = 0 and
/// whenever x/T > 700.
double planck(double x, double T);

/// dB/dT in scaled units. Throws DomainError for T <= 0.
double planck_dT(double x, double T);

/// C_1 = (1/2) max_tau int_0^Z kappa E_1(kappa |tau - t|) dt = 1 - E_2(kappa Z / 2).
double contraction_bound(double kappa, double Z);

/// 1 - C_1 = E_2(kappa Z / 2) without the cancellation; for kappa Z in the
/// hundreds C_1 rounds to 1 in double precision while this stays positive.
double contraction_gap(double kappa, double Z);

}  // namespace stratrt
