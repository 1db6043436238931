#pragma once

namespace pgl::constants {

// CODATA 2018. planck, light_speed and boltzmann are exact by definition;
// hbar is planck/(2*pi) to 10 significant digits.
inline constexpr double planck      = 6.62607015e-34;  // J s
inline constexpr double hbar        = 1.054571817e-34; // J s
inline constexpr double light_speed = 2.99792458e8;    // m/s
inline constexpr double boltzmann   = 1.380649e-23;    // J/K

inline constexpr double pi = 3.14159265358979323846;

} // namespace pgl::constants
