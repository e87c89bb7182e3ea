#pragma once

#include <numbers>

namespace pnm::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// hbar / k_B in K*s.
inline constexpr double kHbarOverKb = 7.6382e-12;

// Electron gyromagnetic ratio, rad/s per tesla (2pi * 28 GHz/T).
inline constexpr double kGammaSpin = kTwoPi * 2.8e6 * 1e4;

inline constexpr double ghz(double nu_ghz) { return kTwoPi * nu_ghz * 1e9; }
inline constexpr double mhz(double nu_mhz) { return kTwoPi * nu_mhz * 1e6; }
inline constexpr double to_ghz(double omega) { return omega / (kTwoPi * 1e9); }

}  // namespace pnm::units
