#include "squidsim/spectral_solver.hpp"

#include <cmath>
#include <sstream>

#include <lapacke.h>

namespace squidsim {

namespace {

constexpr double parity_tol = 1e-6;

// Reverse a grid-sampled function; on a symmetric grid x[n-1-i] = -x[i].
Eigen::VectorXd mirrored(const Eigen::VectorXd& f) { return f.reverse(); }

} // namespace

double SpectralBasis::energy(int n) const {
    if (n < 0 || n >= n_levels())
        throw IndexOutOfRange("level index out of range");
    return energies_[n];
}

double SpectralBasis::tunneling_period() const {
    if (n_levels() < 2)
        throw IndexOutOfRange("tunneling period needs at least two levels");
    return 2.0 * constants::pi * constants::hbar_eV_s / (energies_[1] - energies_[0]);
}

SpectralBasis solve_spectrum(const Grid& grid, double kinetic_coefficient,
                             const std::function<double(double)>& potential,
                             int n_levels) {
    grid.validate();
    if (!(kinetic_coefficient > 0.0))
        throw std::invalid_argument("kinetic coefficient must be positive");
    const int n = grid.n_points;
    const int m = n - 2; // interior points; hard walls at the ends
    if (n_levels < 1 || n_levels > m / 10)
        throw std::invalid_argument("n_levels must satisfy 1 <= n_levels << n_points");

    const double dx = grid.dx();
    const Eigen::VectorXd x = grid.points();

    std::vector<double> diag(m), off(m - 1);
    const double k2 = kinetic_coefficient / (dx * dx);
    for (int i = 0; i < m; ++i) {
        const double v = potential(x[i + 1]);
        if (!std::isfinite(v))
            throw std::invalid_argument("potential is not finite on the grid");
        diag[i] = 2.0 * k2 + v;
    }
    for (int i = 0; i + 1 < m; ++i) off[i] = -k2;

    std::vector<double> w(m), z(static_cast<size_t>(m) * n_levels);
    std::vector<lapack_int> isuppz(2 * static_cast<size_t>(n_levels));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', m, diag.data(), off.data(),
        0.0, 0.0, 1, n_levels, 0.0, &found, w.data(), z.data(), m, isuppz.data());
    if (info != 0 || found < n_levels) {
        std::ostringstream os;
        os << "tridiagonal eigensolver failed (info = " << info
           << ", found " << found << " of " << n_levels << " levels)";
        throw ConvergenceFailure(os.str());
    }

    SpectralBasis basis;
    basis.grid_ = grid;
    basis.kinetic_ = kinetic_coefficient;
    basis.energies_ = Eigen::Map<Eigen::VectorXd>(w.data(), n_levels);

    // Embed with the wall zeros; normalize under the grid measure.
    basis.functions_ = Eigen::MatrixXd::Zero(n_levels, n);
    const double inv_sqrt_dx = 1.0 / std::sqrt(dx);
    for (int lev = 0; lev < n_levels; ++lev)
        for (int i = 0; i < m; ++i)
            basis.functions_(lev, i + 1) = z[static_cast<size_t>(lev) * m + i] * inv_sqrt_dx;

    // Parity: sign of the overlap with the mirrored function. When clean,
    // project onto the parity sector; this removes the eigensolver's tiny
    // symmetry contamination (otherwise equal-parity x elements float around
    // 1e-8 instead of vanishing).
    basis.parities_.assign(n_levels, Parity::none);
    if (grid.symmetric()) {
        for (int lev = 0; lev < n_levels; ++lev) {
            Eigen::VectorXd phi = basis.functions_.row(lev);
            Eigen::VectorXd rev = mirrored(phi);
            const double overlap = trapezoid(phi, rev, dx);
            if (std::abs(overlap - 1.0) <= parity_tol)
                basis.parities_[lev] = Parity::even;
            else if (std::abs(overlap + 1.0) <= parity_tol)
                basis.parities_[lev] = Parity::odd;
            else
                continue;
            const double sign = basis.parities_[lev] == Parity::even ? 1.0 : -1.0;
            Eigen::VectorXd projected = 0.5 * (phi + sign * rev);
            projected /= std::sqrt(trapezoid(projected, projected, dx));
            basis.functions_.row(lev) = projected;
        }
    }

    // Gauge: ground state with positive mean, then cascade signs so that
    // <n-1|x|n> < 0. This makes (|0> + |1>)/sqrt(2) left-localized.
    {
        Eigen::VectorXd phi0 = basis.functions_.row(0);
        if (trapezoid(phi0, dx) < 0.0) basis.functions_.row(0) *= -1.0;
        Eigen::VectorXd xw = x;
        for (int lev = 1; lev < n_levels; ++lev) {
            Eigen::VectorXd prev = basis.functions_.row(lev - 1);
            Eigen::VectorXd cur = basis.functions_.row(lev);
            Eigen::VectorXd xcur = x.cwiseProduct(cur);
            const double elem = trapezoid(prev, xcur, dx);
            if (elem > 1e-12) {
                basis.functions_.row(lev) *= -1.0;
            } else if (std::abs(elem) <= 1e-12) {
                int imax = 0;
                cur.cwiseAbs().maxCoeff(&imax);
                if (cur[imax] < 0.0) basis.functions_.row(lev) *= -1.0;
            }
        }
    }

    basis.x_matrix_.resize(n_levels, n_levels);
    for (int a = 0; a < n_levels; ++a) {
        Eigen::VectorXd xa = x.cwiseProduct(Eigen::VectorXd(basis.functions_.row(a)));
        for (int b = a; b < n_levels; ++b) {
            Eigen::VectorXd phib = basis.functions_.row(b);
            const double v = trapezoid(xa, phib, dx);
            basis.x_matrix_(a, b) = v;
            basis.x_matrix_(b, a) = v;
        }
    }

    // Variational residual ||H phi - E phi|| in the grid norm.
    double max_res = 0.0;
    for (int lev = 0; lev < n_levels; ++lev) {
        double acc = 0.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double lap = (basis.functions_(lev, i + 1) - 2.0 * basis.functions_(lev, i) +
                                basis.functions_(lev, i - 1)) / (dx * dx);
            const double r = -kinetic_coefficient * lap +
                             (potential(x[i]) - basis.energies_[lev]) * basis.functions_(lev, i);
            acc += r * r;
        }
        max_res = std::max(max_res, std::sqrt(acc * dx));
    }
    basis.max_residual_ = max_res;

    return basis;
}

double x_matrix_element(const SpectralBasis& basis, int m, int n) {
    if (m < 0 || n < 0 || m >= basis.n_levels() || n >= basis.n_levels())
        throw IndexOutOfRange("x_matrix_element index out of range");
    return basis.x_matrix()(m, n);
}

ConvergenceReport convergence_study(const Grid& base_grid, double kinetic_coefficient,
                                    const std::function<double(double)>& potential,
                                    int n_levels) {
    if (n_levels < 4)
        throw std::invalid_argument("convergence study tracks both doublets; need n_levels >= 4");
    ConvergenceReport report;
    for (int factor : {1, 2, 4}) {
        const Grid g = base_grid.refined(factor);
        const SpectralBasis b = solve_spectrum(g, kinetic_coefficient, potential, n_levels);
        report.n_points.push_back(g.n_points);
        report.energies.push_back(b.energies());
    }
    const auto& e1 = report.energies[0];
    const auto& e2 = report.energies[1];
    const auto& e4 = report.energies[2];
    report.drift_coarse = (e2 - e1).cwiseAbs();
    report.drift_fine = (e4 - e2).cwiseAbs();

    const double s10_2 = e2[1] - e2[0], s10_4 = e4[1] - e4[0];
    const double s32_2 = e2[3] - e2[2], s32_4 = e4[3] - e4[2];
    report.split10_drift_rel = std::abs(s10_4 - s10_2) / std::abs(s10_4);
    report.split32_drift_rel = std::abs(s32_4 - s32_2) / std::abs(s32_4);
    report.grid_too_coarse = report.split10_drift_rel > 0.01;

    report.richardson_energies = e4 + (e4 - e2) / 3.0;
    return report;
}

void ensure_grid_converged(const ConvergenceReport& report) {
    if (report.grid_too_coarse) {
        std::ostringstream os;
        os << "ground-doublet splitting drifts by "
           << report.split10_drift_rel * 100.0 << "% between the two finest grids";
        throw GridTooCoarse(os.str());
    }
}

} // namespace squidsim
