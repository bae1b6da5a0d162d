#pragma once

#include <numbers>

namespace ionxy::constants {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double elementary_charge = 1.602176634e-19;     // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double hbar = 1.054571817e-34;                  // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;    // kg

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace ionxy::constants
