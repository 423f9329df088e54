#pragma once

#include <numbers>

namespace squidsim {

/// Fundamental constants (CODATA 2018 exact definitions where available).
/// Internal unit system: energies in eV, lengths dimensionless (flux in units
/// of the flux quantum), time in seconds.
struct PhysicalConstants {
    double hbar = 6.582119569509067e-16;        ///< eV s
    double planck_h = 4.135667696923859e-15;    ///< eV s
    double boltzmann = 8.617333262145178e-5;    ///< eV / K
    double flux_quantum = 2.067833848461929e-15; ///< Wb, h/2e
    double electronvolt = 1.602176634e-19;      ///< J
};

namespace constants {

inline constexpr double pi = std::numbers::pi;

inline constexpr double planck_J_s = 6.62607015e-34;
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double joule_per_eV = elementary_charge_C;

inline constexpr double hbar_J_s = planck_J_s / (2.0 * pi);
inline constexpr double hbar_eV_s = hbar_J_s / joule_per_eV;
inline constexpr double planck_eV_s = planck_J_s / joule_per_eV;
inline constexpr double boltzmann_eV_per_K = 1.380649e-23 / joule_per_eV;

// h/2e; the standard superconducting flux quantum.
inline constexpr double flux_quantum_Wb = planck_J_s / (2.0 * elementary_charge_C);

} // namespace constants

inline PhysicalConstants standard_constants() { return PhysicalConstants{}; }

} // namespace squidsim
