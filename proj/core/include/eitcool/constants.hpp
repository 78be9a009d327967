#pragma once

// Physical constants (CODATA 2018) and the default experimental scales used
// throughout. All SI. Everything frequency-like is angular (rad/s) unless a
// name says otherwise.

namespace eitcool::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;             // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double epsilon0 = 8.8541878128e-12;         // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

// Ion mass used by default: 171 u exactly (heavy-isotope Yb+ chain;
// the integer mass number is an adequate approximation at our tolerances).
inline constexpr double default_ion_mass = 171.0 * atomic_mass_unit;

// Default optical wavelengths: the dipole transition driven by the cooling
// lasers, and the counter-propagating Raman pair used for thermometry.
inline constexpr double default_wavelength_eit = 369.5e-9;   // m
inline constexpr double default_wavelength_raman = 355.0e-9; // m

// Natural linewidth of the excited state (angular) and Zeeman half-splitting
// between the m = -1 and m = +1 ground states (angular).
inline constexpr double default_gamma = two_pi * 19.6e6;     // rad/s
inline constexpr double default_delta_b = two_pi * 7.7e6;    // rad/s

} // namespace eitcool::constants
