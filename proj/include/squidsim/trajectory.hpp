#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "squidsim/damping_engine.hpp"

namespace squidsim {

/// Quantum-jump unravelling of the energy-measurement master equation.
/// Lindblad operator sqrt(kappa) H; between jumps the state drifts under the
/// non-Hermitian H - i (hbar kappa / 2) H^2 (diagonal in the energy basis, so
/// the drift is exact per step), a jump applies H and renormalizes, and the
/// first-order jump probability per step is kappa <H^2> dt.
///
/// Energies are shifted by -E0 before building jump rates (offset convention;
/// the ensemble mean is offset-invariant, individual trajectories are not).
struct TrajectoryConfig {
    int n_trajectories = 1000;
    std::uint64_t seed = 1;
    double dt = 0.0;        ///< requested jump-test step, seconds
    double t_max = 0.0;     ///< seconds
    int n_samples = 201;    ///< recorded times including t = 0

    enum class Offset { ground_state, none };
    Offset offset = Offset::ground_state;

    int n_threads = 0;      ///< 0 = hardware concurrency

    void validate() const;
};

struct TrajectoryResult {
    std::vector<double> times_s;
    std::vector<double> mean_x;      ///< ensemble mean <x(t)>
    std::vector<double> std_err;     ///< standard error of the mean
    /// Ensemble mean density matrix at every recorded time.
    std::vector<Eigen::MatrixXcd> mean_density;
    /// Per-trajectory coefficient vector at t_max (row = trajectory).
    Eigen::MatrixXcd final_coefficients;
    /// Per-trajectory max_n |c_n|^2 at t_max.
    Eigen::VectorXd max_population;

    double dt_actual = 0.0;
    double max_jump_probability = 0.0;
    double max_norm_error = 0.0;
    long total_jumps = 0;

    /// Rows "trajectory_id |c_0|^2 |c_1|^2 ..." after a '#' header.
    void write_terminal_populations(std::ostream& os) const;
};

/// Core entry point on raw (energies, x matrix) data.
TrajectoryResult run_trajectories(const Eigen::VectorXd& energies_eV,
                                  const Eigen::MatrixXd& x_matrix,
                                  const Eigen::VectorXcd& psi0,
                                  const MeasurementCoupling& kappa,
                                  const TrajectoryConfig& config);

TrajectoryResult run_trajectories(const Eigen::VectorXcd& psi0, const SpectralBasis& basis,
                                  const MeasurementCoupling& kappa,
                                  const TrajectoryConfig& config);

/// Fraction of trajectories with max_n |c_n(t_max)|^2 above the threshold.
double eigenstate_convergence(const TrajectoryResult& result, double threshold = 0.99);

/// Terminal argmax-level histogram (counts per basis level).
std::vector<long> terminal_level_counts(const TrajectoryResult& result);

/// splitmix64-derived per-trajectory seed; documented so that runs are
/// reproducible across parallel schedules.
std::uint64_t derive_trajectory_seed(std::uint64_t seed, std::uint64_t index);

} // namespace squidsim
