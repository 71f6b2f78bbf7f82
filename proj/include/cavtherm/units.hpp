#pragma once

namespace cavtherm::units {

// Internal units: hbar = 1, time in ns, angular frequencies in rad/ns.
// Energies and drive amplitudes are therefore rad/ns as well.

// k_B/hbar in rad/(ns*K), rounded from CODATA k_B = 1.380649e-23 J/K,
// hbar = 1.054571817e-34 J*s.
inline constexpr double kB_over_hbar = 130.92;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Conversions from the lab-sheet units used in scenario files.
inline constexpr double ghz_to_rad_per_ns(double nu_ghz) {
    return 2.0 * pi * nu_ghz;
}
inline constexpr double mhz_to_rad_per_ns(double nu_mhz) {
    return 2.0 * pi * nu_mhz * 1e-3;
}

inline constexpr double thermal_scale(double T0_kelvin) {
    return kB_over_hbar * T0_kelvin;
}

} // namespace cavtherm::units
