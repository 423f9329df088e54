#include "squidsim/squid_model.hpp"

#include <cmath>
#include <sstream>

namespace squidsim {

using constants::joule_per_eV;
using constants::pi;

namespace {

const double bistable_upper = 2.5 * pi;
// Reject just short of the pole of the inverse map, where L diverges.
const double physical_guard = 1.0 - 1e-6;

double mu_bound_eV(double lambda_eV) { return 1.5 * lambda_eV / (pi * pi); }

} // namespace

void CircuitParams::validate() const {
    if (capacitance && !(*capacitance > 0.0))
        throw std::invalid_argument("capacitance must be positive");
    if (!(inductance > 0.0))
        throw std::invalid_argument("inductance must be positive");
    if (!(critical_current > 0.0))
        throw std::invalid_argument("critical current must be positive");
    if (!(flux_quantum > 0.0))
        throw std::invalid_argument("flux quantum must be positive");
}

bool CircuitParams::symmetric_bias(double tol) const {
    const double ratio = external_flux / flux_quantum - 0.5;
    return std::abs(ratio - std::round(ratio)) <= tol;
}

QuarticPotential::QuarticPotential(double mu_eV, double lambda_eV)
    : mu(mu_eV), lambda(lambda_eV), v0(3.0 * lambda_eV / (8.0 * std::pow(pi, 4))) {
    validate();
}

QuarticPotential::QuarticPotential(double mu_eV, double lambda_eV, double v0_eV)
    : mu(mu_eV), lambda(lambda_eV), v0(v0_eV) {
    validate();
}

void QuarticPotential::validate() const {
    if (!(mu > 0.0) || !(lambda > 0.0))
        throw NotPhysical("quartic potential needs mu > 0 and lambda > 0");
    if (mu > physical_guard * mu_bound_eV(lambda)) {
        std::ostringstream os;
        os << "mu = " << mu << " eV exceeds the physical bound 3*lambda/(2*pi^2) = "
           << mu_bound_eV(lambda) << " eV (guard band 1e-6)";
        throw NotPhysical(os.str());
    }
    const double v0_expected = 3.0 * lambda / (8.0 * std::pow(pi, 4));
    if (std::abs(v0 - v0_expected) > 1e-9 * std::abs(v0_expected))
        throw NotPhysical("v0 inconsistent with 3*lambda/(8*pi^4)");
}

double beta(const CircuitParams& params) {
    params.validate();
    return 2.0 * pi * params.inductance * params.critical_current / params.flux_quantum;
}

BistabilityCheck validate_bistable(double beta_value) {
    BistabilityCheck check;
    check.beta = beta_value;
    check.bistable = beta_value > 1.0 && beta_value < bistable_upper;
    std::ostringstream os;
    os << "beta = " << beta_value;
    if (!(beta_value > 1.0))
        os << ": monostable, beta <= 1";
    else if (!(beta_value < bistable_upper))
        os << ": beyond the multistable bound beta >= 5*pi/2";
    else
        os << ": bistable";
    check.diagnostic = os.str();
    return check;
}

BistabilityCheck validate_bistable(const CircuitParams& params) {
    return validate_bistable(beta(params));
}

QuarticCoefficients quartic_map_unchecked(const CircuitParams& params) {
    params.validate();
    const double phi0 = params.flux_quantum;
    const double ic_phi0 = params.critical_current * phi0;
    const double mu_J = 2.0 * pi * ic_phi0 - phi0 * phi0 / params.inductance;
    const double lambda_J = 4.0 * std::pow(pi, 3) * ic_phi0 / 3.0;
    const double v0_J = ic_phi0 / (2.0 * pi);
    return {mu_J / joule_per_eV, lambda_J / joule_per_eV, v0_J / joule_per_eV};
}

QuarticPotential to_quartic(const CircuitParams& params) {
    const auto check = validate_bistable(params);
    if (!check.bistable) throw NotBistable(check.diagnostic);
    const auto c = quartic_map_unchecked(params);
    if (c.mu > physical_guard * mu_bound_eV(c.lambda))
        throw NotPhysical("mapped mu violates mu < 3*lambda/(2*pi^2)");
    return QuarticPotential(c.mu, c.lambda, c.v0);
}

CircuitParams from_quartic(const QuarticPotential& q) {
    q.validate();
    const double phi0 = constants::flux_quantum_Wb;
    const double lambda_J = q.lambda * joule_per_eV;
    const double mu_J = q.mu * joule_per_eV;
    const double ic = 3.0 * lambda_J / (4.0 * std::pow(pi, 3) * phi0);
    const double denom = 2.0 * pi * ic * phi0 - mu_J;
    // validate() already rejects the guard band, so denom is bounded away from 0.
    CircuitParams params;
    params.inductance = phi0 * phi0 / denom;
    params.critical_current = ic;
    params.external_flux = 0.5 * phi0;
    params.flux_quantum = phi0;
    return params;
}

double potential_full(double x, const CircuitParams& params) {
    params.validate();
    if (!params.symmetric_bias())
        throw std::invalid_argument("potential_full requires the symmetric-bias condition");
    const double phi0 = params.flux_quantum;
    const double parabolic = phi0 * phi0 / (2.0 * params.inductance) * x * x;
    const double periodic = params.critical_current * phi0 / (2.0 * pi) * std::cos(2.0 * pi * x);
    return (parabolic + periodic) / joule_per_eV;
}

double potential_quartic(double x, const QuarticPotential& q) {
    return q.v0 + potential_quartic_depth(x, q);
}

double potential_quartic_depth(double x, const QuarticPotential& q) {
    const double x2 = x * x;
    return -0.5 * q.mu * x2 + 0.25 * q.lambda * x2 * x2;
}

double kinetic_coefficient(double capacitance_F) {
    if (!(capacitance_F > 0.0))
        throw std::invalid_argument("capacitance must be positive");
    const double phi0 = constants::flux_quantum_Wb;
    const double k_J = constants::hbar_J_s * constants::hbar_J_s /
                       (2.0 * capacitance_F * phi0 * phi0);
    return k_J / joule_per_eV;
}

WellGeometry well_geometry(const QuarticPotential& q, double capacitance_F) {
    q.validate();
    const double k = kinetic_coefficient(capacitance_F);
    WellGeometry geom;
    const double xm = std::sqrt(q.mu / q.lambda);
    geom.minima_x = {-xm, xm};
    geom.barrier_height = q.mu * q.mu / (4.0 * q.lambda);
    geom.curvature_at_minimum = 2.0 * q.mu;
    geom.zero_point_energy = std::sqrt(2.0 * k * geom.curvature_at_minimum);
    geom.effective_mass = capacitance_F * constants::flux_quantum_Wb * constants::flux_quantum_Wb;
    return geom;
}

WkbEstimate wkb_frequency(const WellGeometry& geom) {
    if (!(geom.barrier_height > 0.0) || !(geom.zero_point_energy > 0.0))
        throw std::invalid_argument("wkb_frequency needs dU > 0 and hbar*omega0 > 0");
    const double ratio = geom.barrier_height / geom.zero_point_energy;
    WkbEstimate est;
    est.hbar_omega = geom.zero_point_energy * std::sqrt(ratio) * std::exp(-ratio);
    est.omega = est.hbar_omega / constants::hbar_eV_s;
    return est;
}

double thermal_ratio(const WellGeometry& geom, double temperature_K) {
    if (temperature_K < 0.0)
        throw std::invalid_argument("temperature must be nonnegative");
    return constants::boltzmann_eV_per_K * temperature_K / geom.barrier_height;
}

} // namespace squidsim
