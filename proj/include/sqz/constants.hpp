#pragma once

#include <numbers>

namespace sqz::constants {

/// Speed of light in vacuum, m/s (exact, SI).
inline constexpr double c = 299'792'458.0;

/// Reduced Planck constant, J*s (CODATA 2018).
inline constexpr double hbar = 1.054'571'817e-34;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace sqz::constants
