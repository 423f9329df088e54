#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "squidsim/spectral_solver.hpp"

namespace squidsim {

/// Gaussian flux wavepacket in the dimensionless coordinate:
/// psi0(x) = (pi sigma^2)^(-1/4) exp(-(x - x_m)^2 / (2 sigma^2)).
struct GaussianSpec {
    double x_m = -0.27;
    double sigma_x = 0.06;

    void validate(const Grid& grid) const {
        if (!(sigma_x > 0.0))
            throw std::invalid_argument("sigma_x must be positive");
        if (std::abs(x_m) + 5.0 * sigma_x >= grid.x_max)
            throw SupportOverflow("gaussian 5-sigma support leaves the grid");
    }

    std::string label() const;
};

/// Expansion of an initial wavefunction over the truncated energy basis.
struct ProjectedState {
    Eigen::VectorXcd coefficients;  ///< c_n = <n|psi0>
    double captured_norm = 0.0;     ///< sum |c_n|^2
    int basis_size = 0;

    bool low_capture() const { return captured_norm < 0.99; }
};

/// Truncated density matrix in the energy eigenbasis (or, for the two-level
/// closed forms, the left/right representation). Holds a non-owning pointer
/// to the basis it was built on when one exists.
struct DensityMatrix {
    Eigen::MatrixXcd elements;
    const SpectralBasis* basis = nullptr;
    std::string state_label;
    double captured_norm = 1.0;

    int size() const { return static_cast<int>(elements.rows()); }
    double trace() const { return elements.trace().real(); }
    double purity() const { return (elements * elements).trace().real(); }
    double hermiticity_error() const {
        return (elements - elements.adjoint()).cwiseAbs().maxCoeff();
    }
    /// Smallest eigenvalue; for a valid state this is >= -1e-10.
    double min_eigenvalue() const;
    void validate(double trace_tol = 1e-9) const;
};

/// Grid-sampled Gaussian wavepacket, analytic normalization (unit grid norm to
/// 1e-10 whenever the support invariant holds).
Eigen::VectorXd make_gaussian(const GaussianSpec& spec, const Grid& grid);

/// Project onto the basis by trapezoid quadrature. Throws GridMismatch when
/// the sample count differs from the basis grid.
ProjectedState project(const Eigen::VectorXd& wavefunction, const SpectralBasis& basis);

/// rho_nm(0) = c_n conj(c_m), optionally renormalized to unit trace.
/// Throws InsufficientCapture below min_capture.
DensityMatrix density_from_projection(const ProjectedState& state, bool renormalize = true,
                                      double min_capture = 0.9);

enum class Side { left, right };

/// (|0> +- |1>)/sqrt(2) as a rank-1 density matrix over the full basis size.
/// With the <0|x|1> < 0 gauge, `left` has negative mean flux deviation.
DensityMatrix make_lr_state(Side side, const SpectralBasis& basis);

/// Density matrix for an energy eigenstate |n><n|.
DensityMatrix make_eigenstate(int n, const SpectralBasis& basis);

} // namespace squidsim
