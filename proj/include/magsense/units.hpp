#pragma once

#include <numbers>

namespace magsense::units {

// CODATA 2018 exact / recommended values, SI.
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kBoltzmann = 1.380649e-23;      // J / K
inline constexpr double kMu0 = 1.25663706212e-6;        // N / A^2
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
constexpr double angular(double hertz) { return kTwoPi * hertz; }

/// Angular frequency (rad/s) to ordinary frequency (Hz).
constexpr double ordinary(double rad_per_s) { return rad_per_s / kTwoPi; }

// YIG electron gyromagnetic ratio, gamma / 2pi = 28 GHz/T.
inline constexpr double kGyromagneticYig = angular(28.0e9);  // rad/(s T)

}  // namespace magsense::units
