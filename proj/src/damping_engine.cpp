#include "squidsim/damping_engine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>

namespace squidsim {

using std::complex;
using constants::hbar_eV_s;
using constants::planck_eV_s;

namespace {

void check_times(const std::vector<double>& times) {
    double prev = -1.0;
    for (double t : times) {
        if (!(t >= 0.0)) throw std::invalid_argument("times must be nonnegative");
        if (t < prev) throw std::invalid_argument("times must be sorted ascending");
        prev = t;
    }
}

void write_kv(std::ostream& os, const char* key, double value) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# %s = %.12e\n", key, value);
    os << buf;
}

} // namespace

void FluxTrace::write(std::ostream& os) const {
    os << "# flux-trace v1\n";
    write_kv(os, "kappa_e_1_per_eV2_s", meta.kappa_e);
    write_kv(os, "kappa_over_crit10", meta.kappa_over_crit10);
    write_kv(os, "kappa_over_crit32", meta.kappa_over_crit32);
    os << "# basis_size = " << meta.basis_size << "\n";
    os << "# initial_state = " << meta.initial_state << "\n";
    write_kv(os, "captured_norm", meta.captured_norm);
    write_kv(os, "T10_s", meta.tunneling_period_s);
    os << "# columns: time_s time_T10 mean_x\n";
    char buf[96];
    for (size_t i = 0; i < times_s.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12e %.12e %.12e\n",
                      times_s[i], times_T10[i], mean_x[i]);
        os << buf;
    }
}

const PairDecay& DecayTable::pair(int n, int m) const {
    for (const auto& p : pairs)
        if (p.n == n && p.m == m) return p;
    throw IndexOutOfRange("pair not present in decay table");
}

bool DecayTable::survives(int n, int m, double tau_s) const {
    if (kappa_e == 0.0) return true;
    const auto& p = pair(n, m);
    const double de = p.omega * hbar_eV_s;
    return de < std::sqrt(2.0 / (kappa_e * tau_s));
}

DensityMatrix evolve_density(const DensityMatrix& rho0, const SpectralBasis& basis,
                             const MeasurementCoupling& kappa, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    const int n = rho0.size();
    if (n > basis.n_levels())
        throw IndexOutOfRange("density matrix larger than the basis");
    const Eigen::VectorXd& e = basis.energies();

    DensityMatrix rho = rho0;
    rho.basis = &basis;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const double de = e[b] - e[a];
            const double decay = std::exp(-0.5 * kappa.kappa_e * de * de * t);
            // rho_ab picks up exp(-i (E_a - E_b) t / hbar) = exp(+i de t / hbar).
            const complex<double> factor = std::polar(decay, de * t / hbar_eV_s);
            rho.elements(a, b) = rho0.elements(a, b) * factor;
            rho.elements(b, a) = std::conj(rho.elements(a, b));
        }
    }
    return rho;
}

FluxTrace flux_trace(const DensityMatrix& rho0, const SpectralBasis& basis,
                     const MeasurementCoupling& kappa, const std::vector<double>& times_s) {
    check_times(times_s);
    const int n = rho0.size();
    if (n > basis.n_levels())
        throw IndexOutOfRange("density matrix larger than the basis");
    const Eigen::VectorXd& e = basis.energies();
    const Eigen::MatrixXd& x = basis.x_matrix();

    // Per-pair weights rho_ab(0) * X(b, a); (a, b) and (b, a) evolve as
    // conjugates, so the full complex sum is tracked for the residual check.
    struct Term {
        complex<double> weight;
        double omega;   // rad/s, phase of the (a, b) element
        double gamma;   // 1/s
    };
    std::vector<Term> terms;
    complex<double> diag{0.0, 0.0};
    for (int a = 0; a < n; ++a) {
        diag += rho0.elements(a, a) * x(a, a);
        for (int b = a + 1; b < n; ++b) {
            const double de = e[b] - e[a];
            terms.push_back({rho0.elements(a, b) * x(b, a), de / hbar_eV_s,
                             0.5 * kappa.kappa_e * de * de});
        }
    }

    FluxTrace trace;
    trace.times_s = times_s;
    const double t10 = basis.n_levels() >= 2 ? basis.tunneling_period()
                                             : std::numeric_limits<double>::quiet_NaN();
    trace.times_T10.resize(times_s.size());
    trace.mean_x.resize(times_s.size());
    double max_imag = 0.0;
    for (size_t i = 0; i < times_s.size(); ++i) {
        const double t = times_s[i];
        complex<double> acc = diag;
        for (const auto& term : terms) {
            const complex<double> z = term.weight *
                std::polar(std::exp(-term.gamma * t), term.omega * t);
            acc += z + std::conj(z);
        }
        max_imag = std::max(max_imag, std::abs(acc.imag()));
        trace.mean_x[i] = acc.real();
        trace.times_T10[i] = t / t10;
    }

    trace.meta.kappa_e = kappa.kappa_e;
    trace.meta.basis_size = n;
    trace.meta.initial_state = rho0.state_label;
    trace.meta.captured_norm = rho0.captured_norm;
    trace.meta.tunneling_period_s = t10;
    trace.meta.max_imag_residual = max_imag;
    if (basis.n_levels() >= 2)
        trace.meta.kappa_over_crit10 = kappa.kappa_e / kappa_crit_10(basis);
    if (basis.n_levels() >= 4)
        trace.meta.kappa_over_crit32 = kappa.kappa_e / kappa_crit_32(basis);
    return trace;
}

FluxTrace two_level_flux(const SpectralBasis& basis, const MeasurementCoupling& kappa,
                         const std::vector<double>& times_s) {
    check_times(times_s);
    if (basis.n_levels() < 2)
        throw IndexOutOfRange("two-level flux needs at least two levels");
    const double de = basis.energy(1) - basis.energy(0);
    const double omega = de / hbar_eV_s;
    const double gamma = 0.5 * kappa.kappa_e * de * de;
    const double x01 = basis.x_matrix()(0, 1);
    const double diag = 0.5 * (basis.x_matrix()(0, 0) + basis.x_matrix()(1, 1));

    FluxTrace trace;
    trace.times_s = times_s;
    const double t10 = basis.tunneling_period();
    trace.times_T10.resize(times_s.size());
    trace.mean_x.resize(times_s.size());
    for (size_t i = 0; i < times_s.size(); ++i) {
        const double t = times_s[i];
        trace.mean_x[i] = diag + x01 * std::cos(omega * t) * std::exp(-gamma * t);
        trace.times_T10[i] = t / t10;
    }
    trace.meta.kappa_e = kappa.kappa_e;
    trace.meta.basis_size = 2;
    trace.meta.initial_state = "left(two-level)";
    trace.meta.tunneling_period_s = t10;
    trace.meta.kappa_over_crit10 = kappa.kappa_e / kappa_crit_10(basis);
    if (basis.n_levels() >= 4)
        trace.meta.kappa_over_crit32 = kappa.kappa_e / kappa_crit_32(basis);
    return trace;
}

DensityMatrix two_level_density(const SpectralBasis& basis, const MeasurementCoupling& kappa,
                                double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
    if (basis.n_levels() < 2)
        throw IndexOutOfRange("two-level density needs at least two levels");
    const double de = basis.energy(1) - basis.energy(0);
    const double omega = de / hbar_eV_s;
    const double env = std::exp(-0.5 * kappa.kappa_e * de * de * t);
    const double c = std::cos(omega * t), s = std::sin(omega * t);
    DensityMatrix rho;
    rho.elements.resize(2, 2);
    rho.elements(0, 0) = 0.5 * (1.0 + env * c);
    rho.elements(0, 1) = complex<double>(0.0, -0.5 * env * s);
    rho.elements(1, 0) = complex<double>(0.0, +0.5 * env * s);
    rho.elements(1, 1) = 0.5 * (1.0 - env * c);
    rho.state_label = "left(LR representation)";
    return rho;
}

DecayTable decay_table(const Eigen::VectorXd& energies_eV, const MeasurementCoupling& kappa) {
    DecayTable table;
    table.kappa_e = kappa.kappa_e;
    const int n = static_cast<int>(energies_eV.size());
    for (int b = 1; b < n; ++b) {
        for (int a = 0; a < b; ++a) {
            PairDecay p;
            p.n = b;
            p.m = a;
            const double de = energies_eV[b] - energies_eV[a];
            p.degenerate = std::abs(de) < 1e-15;
            p.omega = de / hbar_eV_s;
            p.period = p.degenerate ? std::numeric_limits<double>::infinity()
                                    : 2.0 * constants::pi / p.omega;
            p.tau = (kappa.kappa_e > 0.0 && !p.degenerate)
                        ? 2.0 / (kappa.kappa_e * de * de)
                        : std::numeric_limits<double>::infinity();
            p.kappa_crit = p.degenerate ? std::numeric_limits<double>::infinity()
                                        : 1.0 / (planck_eV_s * de);
            table.pairs.push_back(p);
        }
    }
    return table;
}

DecayTable decay_table(const SpectralBasis& basis, const MeasurementCoupling& kappa) {
    return decay_table(basis.energies(), kappa);
}

double kappa_crit_10(const SpectralBasis& basis) {
    return 1.0 / (planck_eV_s * basis.splitting(0, 1));
}

double kappa_crit_32(const SpectralBasis& basis) {
    return 1.0 / (planck_eV_s * basis.splitting(2, 3));
}

} // namespace squidsim
