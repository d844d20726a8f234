#pragma once

#include <numbers>

namespace dsps::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double speed_of_light = 299792458.0;         // m/s
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double hbar = planck / two_pi;               // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

}  // namespace dsps::constants
