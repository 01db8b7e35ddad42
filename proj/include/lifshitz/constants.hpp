#pragma once

// Physical constants used throughout. CODATA 2018 exact/recommended values;
// pinned here so results are reproducible bit for bit.

namespace lifshitz::constants {

inline constexpr double hbar = 1.054571817e-34;     // reduced Planck constant [J s]
inline constexpr double boltzmann = 1.380649e-23;   // Boltzmann constant [J/K]
inline constexpr double light_speed = 299792458.0;  // speed of light in vacuum [m/s]
inline constexpr double gravity = 9.81;             // standard gravity [m/s^2]

inline constexpr const char* table_version = "CODATA-2018";

}  // namespace lifshitz::constants
