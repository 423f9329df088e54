#pragma once

#include <optional>
#include <string>
#include <utility>

#include "squidsim/constants.hpp"
#include "squidsim/errors.hpp"

namespace squidsim {

/// Physical description of an rf ring with a single weak link. Capacitance is
/// optional because the quartic well parameters do not determine it; spectral
/// operations take it explicitly.
struct CircuitParams {
    std::optional<double> capacitance;   ///< F
    double inductance = 0.0;             ///< H
    double critical_current = 0.0;       ///< A
    double external_flux = 0.0;          ///< Wb
    double flux_quantum = constants::flux_quantum_Wb; ///< Wb

    void validate() const;

    /// External flux sits at a half-integer number of flux quanta, which makes
    /// the effective potential symmetric about it.
    bool symmetric_bias(double tol = 1e-9) const;
};

/// Reduced double-well model V(x) = V0 - mu/2 x^2 + lambda/4 x^4 in the
/// dimensionless flux deviation x. All coefficients in eV; V0 is fixed by
/// lambda through V0 = 3 lambda / (8 pi^4).
struct QuarticPotential {
    double mu = 0.0;      ///< eV
    double lambda = 0.0;  ///< eV
    double v0 = 0.0;      ///< eV

    QuarticPotential() = default;
    QuarticPotential(double mu_eV, double lambda_eV);
    QuarticPotential(double mu_eV, double lambda_eV, double v0_eV);

    void validate() const;
};

struct WellGeometry {
    std::pair<double, double> minima_x;  ///< dimensionless, (-sqrt(mu/lambda), +sqrt(mu/lambda))
    double barrier_height = 0.0;         ///< eV, mu^2 / (4 lambda)
    double curvature_at_minimum = 0.0;   ///< eV, V''(x+-) = 2 mu
    double zero_point_energy = 0.0;      ///< eV, hbar*omega0 in each well
    double effective_mass = 0.0;         ///< J s^2, C * Phi0^2
};

struct WkbEstimate {
    double omega = 0.0;          ///< rad/s
    double hbar_omega = 0.0;     ///< eV
};

struct BistabilityCheck {
    bool bistable = false;
    double beta = 0.0;
    std::string diagnostic;
};

/// Raw quartic coefficients of the circuit-to-well map, in eV, without the
/// bistability/physicality gates. Useful near the window boundaries where
/// to_quartic rejects.
struct QuarticCoefficients {
    double mu;
    double lambda;
    double v0;
};

/// beta = 2 pi L I_c / Phi0. Bistable double well for 1 < beta < 5 pi / 2.
double beta(const CircuitParams& params);

BistabilityCheck validate_bistable(double beta_value);
BistabilityCheck validate_bistable(const CircuitParams& params);

QuarticCoefficients quartic_map_unchecked(const CircuitParams& params);

/// mu = 2 pi I_c Phi0 - Phi0^2/L, lambda = 4 pi^3 I_c Phi0 / 3, converted to eV.
/// Throws NotBistable outside the window, NotPhysical past the mu bound.
QuarticPotential to_quartic(const CircuitParams& params);

/// Inverse map: I_c = 3 lambda / (4 pi^3 Phi0), L = Phi0^2 / (2 pi I_c Phi0 - mu).
/// Capacitance is left unset. Throws NotPhysical inside the guard band of the
/// pole mu -> 3 lambda / (2 pi^2).
CircuitParams from_quartic(const QuarticPotential& q);

/// Full circuit potential (Phi0^2 / 2L) x^2 + (I_c Phi0 / 2 pi) cos(2 pi x), eV.
/// Requires the symmetric-bias condition.
double potential_full(double x, const CircuitParams& params);

/// Quartic well including the V0 offset.
double potential_quartic(double x, const QuarticPotential& q);

/// Quartic well with the V0 offset removed (depth frame; minima at -dU).
double potential_quartic_depth(double x, const QuarticPotential& q);

/// Kinetic coefficient K = hbar^2 / (2 C Phi0^2) in eV; H = -K d^2/dx^2 + V(x).
double kinetic_coefficient(double capacitance_F);

WellGeometry well_geometry(const QuarticPotential& q, double capacitance_F);

/// Tunneling frequency estimate omega0 sqrt(dU/hw0) exp(-dU/hw0). Kept in the
/// exact printed form; the spectral solver is authoritative for splittings.
WkbEstimate wkb_frequency(const WellGeometry& geom);

/// k_B T / dU.
double thermal_ratio(const WellGeometry& geom, double temperature_K);

} // namespace squidsim
