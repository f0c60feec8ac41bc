#pragma once

namespace etpa {

// CODATA 2018 values, SI units.
inline constexpr double kHbar = 1.054571817e-34;   // J s
inline constexpr double kEps0 = 8.8541878128e-12;  // F/m
inline constexpr double kC = 2.99792458e8;         // m/s

// Goeppert-Mayer unit for two-photon cross sections.
inline constexpr double kGM = 1.0e-58;  // m^4 s

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSqrtPi = 1.7724538509055160273;

}  // namespace etpa
