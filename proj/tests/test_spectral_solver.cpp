#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "squidsim/spectral_solver.hpp"

using namespace squidsim;
using testsupport::calibrated_setup;
using testsupport::reference_quartic;
using constants::pi;

namespace {

double box_level(double k, double l_box, int n) { return k * std::pow(n * pi / l_box, 2); }

} // namespace

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(-0.8, 0.8, 101), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0.1, 0.8, 1001), std::invalid_argument);
    CHECK_THROWS_AS(Grid(-0.8, -0.1, 1001), std::invalid_argument);
    const Grid g(-0.8, 0.8, 4001);
    CHECK(g.symmetric());
    CHECK(g.dx() == doctest::Approx(1.6 / 4000).epsilon(1e-14));
    CHECK_FALSE(Grid(-0.5, 0.8, 1001).symmetric());
    CHECK(g.refined(2).n_points == 8001);
}

TEST_CASE("particle in a box reproduces the analytic spectrum") {
    const double k = kinetic_coefficient(1e-16);
    const Grid grid(-0.8, 0.8, 4001);
    const auto basis = solve_spectrum(grid, k, [](double) { return 0.0; }, 4);
    for (int n = 0; n < 4; ++n)
        CHECK(basis.energy(n) ==
              doctest::Approx(box_level(k, 1.6, n + 1)).epsilon(5e-3));
    // parity alternates even/odd from the ground state
    CHECK(basis.parities()[0] == Parity::even);
    CHECK(basis.parities()[1] == Parity::odd);
    CHECK(basis.parities()[2] == Parity::even);
    CHECK(basis.parities()[3] == Parity::odd);
}

TEST_CASE("harmonic well reproduces hbar omega (n + 1/2)") {
    const QuarticPotential q = reference_quartic();
    const double k = kinetic_coefficient(1e-16);
    const double spring = 2.0 * q.mu; // curvature at the well minima
    const double hw = std::sqrt(2.0 * spring * k);
    const Grid grid(-0.8, 0.8, 4001);
    const auto basis =
        solve_spectrum(grid, k, [&](double x) { return 0.5 * spring * x * x; }, 4);
    for (int n = 0; n < 4; ++n)
        CHECK(basis.energy(n) == doctest::Approx(hw * (n + 0.5)).epsilon(1e-3));
}

TEST_CASE("double-well spectrum at the calibrated capacitance") {
    const SpectralBasis& basis = calibrated_setup().basis;

    CHECK(basis.energy(0) == doctest::Approx(-0.0440591).epsilon(1e-6));
    CHECK(basis.energy(1) == doctest::Approx(-0.0440585).epsilon(1e-5));
    CHECK(basis.energy(2) == doctest::Approx(-0.0231600).epsilon(2e-2));
    CHECK(basis.energy(3) == doctest::Approx(-0.0230991).epsilon(2e-2));

    const double s10 = basis.splitting(0, 1);
    const double s32 = basis.splitting(2, 3);
    CHECK(s10 > 2e-7);
    CHECK(s10 < 2e-6);
    CHECK(s32 / s10 == doctest::Approx(103.3).epsilon(2e-2));

    SUBCASE("doublet structure") {
        const double gap = basis.energy(2) - basis.energy(1);
        CHECK(gap / s10 > 100.0);
        CHECK(gap / s32 > 100.0);
        // within a factor 2 of the nominal ~100 splitting ratio
        CHECK(s32 / s10 > 50.0);
        CHECK(s32 / s10 < 200.0);
    }

    SUBCASE("parity alternation and selection rule") {
        CHECK(basis.parities()[0] == Parity::even);
        CHECK(basis.parities()[1] == Parity::odd);
        CHECK(basis.parities()[2] == Parity::even);
        CHECK(basis.parities()[3] == Parity::odd);
        double worst = 0.0;
        for (int a = 0; a < basis.n_levels(); ++a)
            for (int b = 0; b < basis.n_levels(); ++b)
                if (basis.parities()[a] == basis.parities()[b] && a != b)
                    worst = std::max(worst, std::abs(x_matrix_element(basis, a, b)));
        CHECK(worst < 1e-8);
        for (int a = 0; a < basis.n_levels(); ++a)
            CHECK(std::abs(x_matrix_element(basis, a, a)) < 1e-8);
    }

    SUBCASE("orthonormality") {
        const double dx = basis.grid().dx();
        double worst = 0.0;
        for (int a = 0; a < basis.n_levels(); ++a) {
            for (int b = 0; b < basis.n_levels(); ++b) {
                Eigen::VectorXd fa = basis.eigenfunctions().row(a);
                Eigen::VectorXd fb = basis.eigenfunctions().row(b);
                const double g = trapezoid(fa, fb, dx) - (a == b ? 1.0 : 0.0);
                worst = std::max(worst, std::abs(g));
            }
        }
        CHECK(worst < 1e-8);
    }

    SUBCASE("variational residual") { CHECK(basis.max_residual() < 1e-8); }

    SUBCASE("gauge and localized doublet") {
        CHECK(basis.x_matrix()(0, 1) < 0.0);
        // Deep doublet: |<0|x|1>| tracks the well position to ~15%.
        CHECK(std::abs(basis.x_matrix()(0, 1)) == doctest::Approx(0.335).epsilon(5e-3));
        CHECK(std::abs(std::abs(basis.x_matrix()(0, 1)) - 0.35) / 0.35 < 0.15);
    }

    SUBCASE("x matrix is exactly symmetric") {
        for (int a = 0; a < basis.n_levels(); ++a)
            for (int b = 0; b < basis.n_levels(); ++b)
                CHECK(x_matrix_element(basis, a, b) == x_matrix_element(basis, b, a));
    }

    SUBCASE("index checks") {
        CHECK_THROWS_AS(x_matrix_element(basis, 0, 99), IndexOutOfRange);
        CHECK_THROWS_AS(basis.energy(-1), IndexOutOfRange);
    }
}

TEST_CASE("solver input validation") {
    const Grid grid(-0.8, 0.8, 501);
    CHECK_THROWS_AS(solve_spectrum(grid, -1.0, [](double) { return 0.0; }, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_spectrum(grid, 1e-4, [](double) { return 0.0; }, 90),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        solve_spectrum(grid, 1e-4,
                       [](double x) {
                           return x > 0 ? std::numeric_limits<double>::infinity() : 0.0;
                       },
                       4),
        std::invalid_argument);
}

TEST_CASE("convergence study") {
    const ModelSetup& setup = calibrated_setup();
    const QuarticPotential q = setup.quartic;
    const auto pot = [q](double x) { return potential_quartic_depth(x, q); };

    SUBCASE("second-order energy drift on the box") {
        const double k = kinetic_coefficient(1e-16);
        const auto report = convergence_study(Grid(-0.8, 0.8, 501), k,
                                              [](double) { return 0.0; }, 4);
        // E0 drift shrinks by the stencil order (factor 4) per density doubling.
        const double ratio = report.drift_coarse[0] / report.drift_fine[0];
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
        // Against the exact dispersion of the stencil: E_fd = K (2 - 2 cos(k dx)) / dx^2,
        // whose deviation from K k^2 predicts the measured drift.
        const double kx = pi / 1.6;
        auto fd_error = [&](int n_pts) {
            const double dx = 1.6 / (n_pts - 1);
            return box_level(k, 1.6, 1) - k * (2.0 - 2.0 * std::cos(kx * dx)) / (dx * dx);
        };
        const double model_drift = std::abs(fd_error(501) - fd_error(1001));
        CHECK(report.drift_coarse[0] > 0.5 * model_drift);
        CHECK(report.drift_coarse[0] < 2.0 * model_drift);
    }

    SUBCASE("default grid is converged") {
        const auto report = convergence_study(setup.grid, setup.kinetic_eV, pot, 4);
        CHECK_FALSE(report.grid_too_coarse);
        CHECK(report.split10_drift_rel < 0.01);
        CHECK_NOTHROW(ensure_grid_converged(report));
        // Richardson extrapolation stays within the drift of the finest grid.
        CHECK(std::abs(report.richardson_energies[0] - report.energies[2][0]) <
              2.0 * report.drift_fine[0]);
    }

    SUBCASE("501-point base grid still resolves the splitting") {
        // Frozen from the study itself: symmetric stencil errors largely cancel
        // in the splitting, so even the coarsest allowed grid drifts by only
        // ~3e-4 between the two finest resolutions and the flag stays off.
        const auto report = convergence_study(Grid(-0.8, 0.8, 501), setup.kinetic_eV, pot, 4);
        CHECK_FALSE(report.grid_too_coarse);
        CHECK(report.split10_drift_rel == doctest::Approx(2.57e-4).epsilon(0.5));
    }

    SUBCASE("oversized span underresolves the wells and is flagged") {
        const auto report = convergence_study(Grid(-6.0, 6.0, 501), setup.kinetic_eV, pot, 4);
        CHECK(report.grid_too_coarse);
        CHECK(report.split10_drift_rel > 0.01);
        CHECK_THROWS_AS(ensure_grid_converged(report), GridTooCoarse);
    }
}
