#pragma once

namespace thinspec::units {

// CODATA 2018 exact / recommended values, SI.
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double k_B = 1.380649e-23;         // J / K
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double nano_kelvin = 1e-9;

/// Inverse temperature 1/(k_B T) expressed in units of 1/energy_unit.
inline double inverse_temperature(double temperature_nK, double energy_unit_J) {
  return energy_unit_J / (k_B * temperature_nK * nano_kelvin);
}

}  // namespace thinspec::units
