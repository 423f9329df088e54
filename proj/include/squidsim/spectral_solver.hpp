#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "squidsim/constants.hpp"
#include "squidsim/errors.hpp"
#include "squidsim/grid.hpp"

namespace squidsim {

enum class Parity { even, odd, none };

/// Lowest eigenpairs of H = -K d^2/dx^2 + V(x) on a hard-wall grid, with
/// parity labels and the position matrix needed by the dynamics.
///
/// Conventions baked in at construction:
///  - eigenfunctions are real, unit L2 norm under the trapezoid grid measure;
///  - on a symmetric grid each eigenfunction is projected onto its parity
///    sector, so equal-parity position elements vanish to machine precision;
///  - signs are fixed so that <n-1|x|n> < 0, which makes (|0> + |1>)/sqrt(2)
///    the left-localized combination.
class SpectralBasis {
  public:
    SpectralBasis() = default;

    int n_levels() const { return static_cast<int>(energies_.size()); }
    int n_points() const { return grid_.n_points; }
    const Grid& grid() const { return grid_; }
    double kinetic_coefficient() const { return kinetic_; }

    const Eigen::VectorXd& energies() const { return energies_; }
    double energy(int n) const;
    /// Row n holds phi_n sampled on the grid (boundary values are zero).
    const Eigen::MatrixXd& eigenfunctions() const { return functions_; }
    const std::vector<Parity>& parities() const { return parities_; }
    const Eigen::MatrixXd& x_matrix() const { return x_matrix_; }

    /// E_b - E_a in eV.
    double splitting(int a, int b) const { return energy(b) - energy(a); }
    /// Ground-doublet tunneling period 2 pi hbar / (E1 - E0), seconds.
    double tunneling_period() const;

    /// Max grid-norm residual ||H phi - E phi|| over the retained levels.
    double max_residual() const { return max_residual_; }

    friend SpectralBasis solve_spectrum(const Grid&, double,
                                        const std::function<double(double)>&, int);

  private:
    Grid grid_;
    double kinetic_ = 0.0;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd functions_;   // n_levels x n_points
    std::vector<Parity> parities_;
    Eigen::MatrixXd x_matrix_;
    double max_residual_ = 0.0;
};

/// Lowest n_levels eigenpairs by finite differences (second-order stencil)
/// and a symmetric tridiagonal eigensolver.
/// Throws ConvergenceFailure if the eigensolver fails and std::invalid_argument
/// on unusable inputs (non-finite potential, too many levels requested).
SpectralBasis solve_spectrum(const Grid& grid, double kinetic_coefficient,
                             const std::function<double(double)>& potential,
                             int n_levels);

/// <m|x|n> by trapezoid quadrature; symmetric in (m, n).
double x_matrix_element(const SpectralBasis& basis, int m, int n);

struct ConvergenceReport {
    std::vector<int> n_points;                ///< 1x, 2x, 4x density
    std::vector<Eigen::VectorXd> energies;    ///< per resolution
    Eigen::VectorXd drift_coarse;             ///< |E(2x) - E(1x)| per level
    Eigen::VectorXd drift_fine;               ///< |E(4x) - E(2x)| per level
    double split10_drift_rel = 0.0;           ///< ground doublet, finest pair
    double split32_drift_rel = 0.0;           ///< second doublet, finest pair
    bool grid_too_coarse = false;
    Eigen::VectorXd richardson_energies;      ///< extrapolated from the two finest
};

/// Re-solves at 1x, 2x, 4x grid density and reports energy and splitting
/// drifts. Flags grid_too_coarse when the ground-doublet splitting moves by
/// more than 1% between the two finest grids.
ConvergenceReport convergence_study(const Grid& base_grid, double kinetic_coefficient,
                                    const std::function<double(double)>& potential,
                                    int n_levels);

/// Throwing wrapper around the study flag.
void ensure_grid_converged(const ConvergenceReport& report);

} // namespace squidsim
