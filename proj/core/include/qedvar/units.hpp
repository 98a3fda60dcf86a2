#pragma once

#include <cmath>
#include <numbers>

// Internal units: hbar = c = eps0 = 1. Energies and frequencies in eV, lengths
// in 1/eV, masses as rest energies in eV, charges in Heaviside-Lorentz units
// (e^2 = 4 pi alpha). Conversions happen only at the I/O boundary.
namespace qedvar::units {

inline constexpr double hbar_c_eV_nm = 197.3269804;
inline constexpr double electron_mass_eV = 510998.95;
inline constexpr double fine_structure = 7.2973525693e-3;

inline double elementary_charge() { return std::sqrt(4.0 * std::numbers::pi * fine_structure); }

inline constexpr double nm_to_natural(double nm) { return nm / hbar_c_eV_nm; }
inline constexpr double natural_to_nm(double inv_eV) { return inv_eV * hbar_c_eV_nm; }
inline constexpr double nm2_to_natural(double nm2) { return nm2 / (hbar_c_eV_nm * hbar_c_eV_nm); }

}  // namespace qedvar::units
