// Configs carry linear frequencies in MHz (f = omega / 2pi). Formulas run in
// angular units, rad/us, so 1 MHz linear -> 2pi rad/us. Rates are 1/us.

#pragma once

#include <numbers>

namespace qbath {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double angular(double linear_mhz) { return kTwoPi * linear_mhz; }
constexpr double linear(double angular_rad_per_us) { return angular_rad_per_us / kTwoPi; }

} // namespace qbath
