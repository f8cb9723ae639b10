#pragma once

#include <cmath>
#include <numbers>

namespace twpa::units {

inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

// Reduced flux phi_ext = 2 pi Phi / Phi0.
inline double reduced_flux(double flux_over_phi0) { return kTwoPi * flux_over_phi0; }
inline double flux_over_phi0(double reduced) { return reduced / kTwoPi; }

}  // namespace twpa::units
