#include "squidsim/trajectory.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

namespace squidsim {

namespace {

constexpr double jump_probability_bound = 0.1;
constexpr int chunk_size = 256; // fixed so results are thread-count independent

struct Kahan {
    double sum = 0.0, carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    void merge(const Kahan& other) {
        add(other.sum);
        add(-other.carry);
    }
};

// xorshift-free uniform in [0, 1) with explicit 53-bit conversion; avoids the
// implementation-defined std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct ChunkAccumulator {
    std::vector<Kahan> sum_x, sum_x2;
    std::vector<Eigen::MatrixXcd> sum_density;

    ChunkAccumulator(int n_samples, int levels)
        : sum_x(n_samples), sum_x2(n_samples),
          sum_density(n_samples, Eigen::MatrixXcd::Zero(levels, levels)) {}
};

} // namespace

std::uint64_t derive_trajectory_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 applied to seed + (index+1) * golden-gamma.
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void TrajectoryConfig::validate() const {
    if (n_trajectories < 1)
        throw std::invalid_argument("need at least one trajectory");
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw std::invalid_argument("dt and t_max must be positive");
    if (n_samples < 2)
        throw std::invalid_argument("need at least two recorded samples");
}

void TrajectoryResult::write_terminal_populations(std::ostream& os) const {
    os << "# terminal populations |c_n|^2 per trajectory\n";
    os << "# columns: trajectory_id";
    for (int n = 0; n < final_coefficients.cols(); ++n) os << " p" << n;
    os << "\n";
    char buf[48];
    for (Eigen::Index i = 0; i < final_coefficients.rows(); ++i) {
        os << i;
        for (Eigen::Index n = 0; n < final_coefficients.cols(); ++n) {
            std::snprintf(buf, sizeof(buf), " %.12e", std::norm(final_coefficients(i, n)));
            os << buf;
        }
        os << "\n";
    }
}

TrajectoryResult run_trajectories(const Eigen::VectorXd& energies_eV,
                                  const Eigen::MatrixXd& x_matrix,
                                  const Eigen::VectorXcd& psi0,
                                  const MeasurementCoupling& kappa,
                                  const TrajectoryConfig& config) {
    config.validate();
    const int levels = static_cast<int>(energies_eV.size());
    if (psi0.size() != levels || x_matrix.rows() != levels || x_matrix.cols() != levels)
        throw std::invalid_argument("state, energies and x matrix sizes disagree");
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("initial coefficients must be normalized to 1e-9");

    // Sampling layout: n_samples - 1 intervals of steps_per_sample steps each.
    const int intervals = config.n_samples - 1;
    const long steps_per_sample =
        std::max(1L, std::lround(config.t_max / (config.dt * intervals)));
    const long n_steps = steps_per_sample * intervals;
    const double dt = config.t_max / static_cast<double>(n_steps);

    Eigen::VectorXd shifted = energies_eV;
    if (config.offset == TrajectoryConfig::Offset::ground_state)
        shifted.array() -= energies_eV[0];

    // Exact one-step drift of the non-Hermitian evolution, diagonal in the
    // energy basis.
    Eigen::VectorXcd drift(levels);
    Eigen::VectorXd rate_weight(levels); // kappa * E_n^2, for <H^2>
    for (int n = 0; n < levels; ++n) {
        const double e = shifted[n];
        rate_weight[n] = kappa.kappa_e * e * e;
        drift[n] = std::polar(std::exp(-0.5 * kappa.kappa_e * e * e * dt),
                              -e * dt / constants::hbar_eV_s);
    }
    const Eigen::MatrixXcd x_cplx = x_matrix.cast<std::complex<double>>();

    TrajectoryResult result;
    result.dt_actual = dt;
    result.times_s.resize(config.n_samples);
    for (int s = 0; s < config.n_samples; ++s)
        result.times_s[s] = static_cast<double>(s) * steps_per_sample * dt;
    result.final_coefficients.resize(config.n_trajectories, levels);
    result.max_population.resize(config.n_trajectories);

    const int n_chunks = (config.n_trajectories + chunk_size - 1) / chunk_size;
    std::vector<ChunkAccumulator> chunks;
    chunks.reserve(n_chunks);
    for (int c = 0; c < n_chunks; ++c) chunks.emplace_back(config.n_samples, levels);

    std::atomic<int> next_chunk{0};
    std::atomic<long> jump_count{0};
    std::mutex stats_mutex;
    double max_prob = 0.0, max_norm_err = 0.0;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        double local_max_prob = 0.0, local_max_norm_err = 0.0;
        long local_jumps = 0;
        Eigen::VectorXcd c(levels);
        try {
            for (;;) {
                const int chunk = next_chunk.fetch_add(1);
                if (chunk >= n_chunks) break;
                ChunkAccumulator& acc = chunks[chunk];
                const int begin = chunk * chunk_size;
                const int end = std::min(begin + chunk_size, config.n_trajectories);
                for (int traj = begin; traj < end; ++traj) {
                    std::mt19937_64 rng(derive_trajectory_seed(config.seed, traj));
                    c = psi0;
                    int sample = 0;
                    for (long step = 0;; ++step) {
                        if (step % steps_per_sample == 0) {
                            const std::complex<double> xv = c.dot(x_cplx * c);
                            acc.sum_x[sample].add(xv.real());
                            acc.sum_x2[sample].add(xv.real() * xv.real());
                            acc.sum_density[sample].noalias() += c * c.adjoint();
                            local_max_norm_err =
                                std::max(local_max_norm_err, std::abs(c.norm() - 1.0));
                            ++sample;
                            if (step == n_steps) break;
                        }
                        double h2 = 0.0;
                        for (int n = 0; n < levels; ++n) h2 += rate_weight[n] * std::norm(c[n]);
                        const double p = h2 * dt;
                        local_max_prob = std::max(local_max_prob, p);
                        if (p >= jump_probability_bound)
                            throw StepTooLarge("jump probability per step reached 0.1; reduce dt");
                        if (uniform01(rng) < p) {
                            for (int n = 0; n < levels; ++n) c[n] *= shifted[n];
                            ++local_jumps;
                        } else {
                            c.array() *= drift.array();
                        }
                        c /= c.norm();
                    }
                    result.final_coefficients.row(traj) = c.transpose();
                    double mp = 0.0;
                    for (int n = 0; n < levels; ++n) mp = std::max(mp, std::norm(c[n]));
                    result.max_population[traj] = mp;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
        jump_count.fetch_add(local_jumps);
        std::lock_guard<std::mutex> lock(stats_mutex);
        max_prob = std::max(max_prob, local_max_prob);
        max_norm_err = std::max(max_norm_err, local_max_norm_err);
    };

    int n_threads = config.n_threads > 0
                        ? config.n_threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, n_chunks));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Deterministic reduction: merge chunk accumulators in chunk order.
    result.mean_x.resize(config.n_samples);
    result.std_err.resize(config.n_samples);
    result.mean_density.assign(config.n_samples, Eigen::MatrixXcd::Zero(levels, levels));
    const double n_traj = static_cast<double>(config.n_trajectories);
    for (int s = 0; s < config.n_samples; ++s) {
        Kahan sx, sx2;
        for (int chnk = 0; chnk < n_chunks; ++chnk) {
            sx.merge(chunks[chnk].sum_x[s]);
            sx2.merge(chunks[chnk].sum_x2[s]);
            result.mean_density[s] += chunks[chnk].sum_density[s];
        }
        result.mean_density[s] /= n_traj;
        const double mean = sx.sum / n_traj;
        result.mean_x[s] = mean;
        if (config.n_trajectories > 1) {
            const double var = std::max(0.0, (sx2.sum - n_traj * mean * mean) / (n_traj - 1.0));
            result.std_err[s] = std::sqrt(var / n_traj);
        } else {
            result.std_err[s] = 0.0;
        }
    }
    result.max_jump_probability = max_prob;
    result.max_norm_error = max_norm_err;
    result.total_jumps = jump_count.load();
    return result;
}

TrajectoryResult run_trajectories(const Eigen::VectorXcd& psi0, const SpectralBasis& basis,
                                  const MeasurementCoupling& kappa,
                                  const TrajectoryConfig& config) {
    const int levels = static_cast<int>(psi0.size());
    if (levels > basis.n_levels())
        throw IndexOutOfRange("state larger than the basis");
    return run_trajectories(basis.energies().head(levels),
                            basis.x_matrix().topLeftCorner(levels, levels), psi0, kappa, config);
}

double eigenstate_convergence(const TrajectoryResult& result, double threshold) {
    const Eigen::Index n = result.max_population.size();
    long converged = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (result.max_population[i] > threshold) ++converged;
    return static_cast<double>(converged) / static_cast<double>(n);
}

std::vector<long> terminal_level_counts(const TrajectoryResult& result) {
    std::vector<long> counts(result.final_coefficients.cols(), 0);
    for (Eigen::Index i = 0; i < result.final_coefficients.rows(); ++i) {
        int best = 0;
        double best_p = -1.0;
        for (Eigen::Index n = 0; n < result.final_coefficients.cols(); ++n) {
            const double p = std::norm(result.final_coefficients(i, n));
            if (p > best_p) {
                best_p = p;
                best = static_cast<int>(n);
            }
        }
        ++counts[best];
    }
    return counts;
}

} // namespace squidsim
