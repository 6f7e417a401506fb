#pragma once

#include <numbers>

namespace ppcqed::constants {

// CODATA 2018. h and e are exact in the revised SI.
inline constexpr double pi = std::numbers::pi;
inline constexpr double planck = 6.62607015e-34;            // J s
inline constexpr double hbar = planck / (2.0 * pi);         // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double vacuum_permeability = 1.25663706212e-6; // N A^-2
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F m^-1
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge); // Wb

}  // namespace ppcqed::constants

namespace ppcqed {

// Angular frequencies are rad/s everywhere inside the library. These two
// helpers are the only place the 2*pi factor should appear; callers at the
// I/O boundary (config parsing, CSV output) use them.
constexpr double hz_to_rad(double hz) { return 2.0 * constants::pi * hz; }
constexpr double rad_to_hz(double rad_per_s) { return rad_per_s / (2.0 * constants::pi); }

}  // namespace ppcqed
