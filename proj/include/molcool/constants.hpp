#pragma once

namespace molcool::constants {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double planck = 6.62607015e-34;     // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K
inline constexpr double c_light = 299792458.0;       // m/s
inline constexpr double amu = 1.66053906660e-27;     // kg

inline constexpr const char* constant_set = "CODATA-2018";

}  // namespace molcool::constants
