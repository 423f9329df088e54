#include "squidsim/state_prep.hpp"

#include <cmath>
#include <cstdio>

namespace squidsim {

std::string GaussianSpec::label() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "gaussian(x_m=%.6g,sigma_x=%.6g)", x_m, sigma_x);
    return buf;
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(elements, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double trace_tol) const {
    if (hermiticity_error() > 1e-12)
        throw std::invalid_argument("density matrix is not Hermitian to 1e-12");
    if (std::abs(trace() - 1.0) > trace_tol)
        throw std::invalid_argument("density matrix trace differs from 1");
    if (min_eigenvalue() < -1e-10)
        throw std::invalid_argument("density matrix is not positive semidefinite");
}

Eigen::VectorXd make_gaussian(const GaussianSpec& spec, const Grid& grid) {
    grid.validate();
    spec.validate(grid);
    const Eigen::VectorXd x = grid.points();
    Eigen::VectorXd psi(x.size());
    const double norm = std::pow(constants::pi * spec.sigma_x * spec.sigma_x, -0.25);
    const double inv2s2 = 1.0 / (2.0 * spec.sigma_x * spec.sigma_x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = x[i] - spec.x_m;
        psi[i] = norm * std::exp(-d * d * inv2s2);
    }
    return psi;
}

ProjectedState project(const Eigen::VectorXd& wavefunction, const SpectralBasis& basis) {
    if (wavefunction.size() != basis.n_points())
        throw GridMismatch("wavefunction and basis live on different grids");
    const double dx = basis.grid().dx();
    ProjectedState state;
    state.basis_size = basis.n_levels();
    state.coefficients.resize(state.basis_size);
    double captured = 0.0;
    for (int n = 0; n < state.basis_size; ++n) {
        Eigen::VectorXd phi = basis.eigenfunctions().row(n);
        const double c = trapezoid(phi, wavefunction, dx);
        state.coefficients[n] = c;
        captured += c * c;
    }
    state.captured_norm = captured;
    return state;
}

DensityMatrix density_from_projection(const ProjectedState& state, bool renormalize,
                                      double min_capture) {
    if (!(state.captured_norm > min_capture)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "captured norm %.6f below the %.2f threshold",
                      state.captured_norm, min_capture);
        throw InsufficientCapture(buf);
    }
    DensityMatrix rho;
    rho.elements = state.coefficients * state.coefficients.adjoint();
    if (renormalize) rho.elements /= state.captured_norm;
    rho.captured_norm = state.captured_norm;
    rho.state_label = "projected";
    return rho;
}

DensityMatrix make_lr_state(Side side, const SpectralBasis& basis) {
    if (basis.n_levels() < 2)
        throw IndexOutOfRange("left/right states need at least two levels");
    const int n = basis.n_levels();
    DensityMatrix rho;
    rho.elements = Eigen::MatrixXcd::Zero(n, n);
    const double s = side == Side::left ? 1.0 : -1.0;
    rho.elements(0, 0) = 0.5;
    rho.elements(1, 1) = 0.5;
    rho.elements(0, 1) = 0.5 * s;
    rho.elements(1, 0) = 0.5 * s;
    rho.basis = &basis;
    rho.state_label = side == Side::left ? "left" : "right";
    return rho;
}

DensityMatrix make_eigenstate(int n, const SpectralBasis& basis) {
    if (n < 0 || n >= basis.n_levels())
        throw IndexOutOfRange("eigenstate index out of range");
    DensityMatrix rho;
    rho.elements = Eigen::MatrixXcd::Zero(basis.n_levels(), basis.n_levels());
    rho.elements(n, n) = 1.0;
    rho.basis = &basis;
    rho.state_label = "eigenstate(" + std::to_string(n) + ")";
    return rho;
}

} // namespace squidsim
