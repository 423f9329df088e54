#pragma once

#include <memory>
#include <string>
#include <vector>

#include "squidsim/trajectory.hpp"

namespace squidsim {

/// Direct adaptive integration of the measurement master equation
///   d rho / dt = -(i/hbar) [H, rho] - (kappa/2) [H, [H, rho]]
/// in the energy eigenbasis, built from matrix commutators (no use of the
/// per-element closed form). Cash-Karp 4(5) with PI step control. Serves as
/// an independent cross-check of the exact evolution.
Eigen::MatrixXcd integrate_master_equation(const Eigen::VectorXd& energies_eV,
                                           const MeasurementCoupling& kappa,
                                           const Eigen::MatrixXcd& rho0,
                                           double t_begin, double t_end,
                                           double rel_tol = 1e-13, double abs_tol = 1e-15);

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string note;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;
    /// Monte Carlo run used for the ensemble checks (terminal-population dump).
    std::shared_ptr<const TrajectoryResult> mc_result;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
    void write(std::ostream& os) const;
};

struct ValidationOptions {
    int n_trajectories = 10000;
    std::uint64_t seed = 20260810;
    int mc_samples = 121;
    double mc_span_T10 = 6.0;       ///< Monte Carlo comparison horizon
    double ode_span_T10 = 10.0;     ///< closed-form vs integrator horizon
    int ode_levels = 4;
    int n_threads = 0;
};

/// Cross-validation battery: closed form vs direct integration, closed form
/// vs Monte Carlo ensemble, terminal jump statistics, and the exact-solution
/// invariants (trace, diagonals, Hermiticity, purity, semigroup, asymptotics).
ValidationReport run_validation_battery(const SpectralBasis& basis,
                                        const ValidationOptions& options);

} // namespace squidsim
