#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "squidsim/state_prep.hpp"

namespace squidsim {

/// Strength of the continuous energy-measurement coupling, 1/(eV^2 s).
/// Zero means the closed system.
struct MeasurementCoupling {
    double kappa_e = 0.0;

    MeasurementCoupling() = default;
    explicit MeasurementCoupling(double k) : kappa_e(k) {
        if (!(k >= 0.0)) throw std::invalid_argument("kappa_e must be nonnegative");
    }
};

/// Time series of the mean flux deviation <x(t)>, with enough metadata to
/// reproduce the run. Physical flux is Phi0 * <x> + Phi_ext.
struct FluxTrace {
    std::vector<double> times_s;
    std::vector<double> times_T10;
    std::vector<double> mean_x;

    struct Metadata {
        double kappa_e = 0.0;
        double kappa_over_crit10 = 0.0;
        double kappa_over_crit32 = 0.0;
        int basis_size = 0;
        std::string initial_state;
        double captured_norm = 1.0;
        double tunneling_period_s = 0.0;
        double max_imag_residual = 0.0;
    } meta;

    /// '#'-commented header followed by "time_s time_T10 mean_x" rows.
    void write(std::ostream& os) const;
};

struct PairDecay {
    int n = 0, m = 0;          ///< n > m
    double omega = 0.0;        ///< Bohr frequency (E_n - E_m)/hbar, rad/s
    double period = 0.0;       ///< T_nm = 2 pi / omega, s
    double tau = 0.0;          ///< amplitude decay constant 2/(kappa dE^2), s
    double kappa_crit = 0.0;   ///< 1/(h dE), 1/(eV^2 s)
    bool degenerate = false;   ///< splitting below 1e-15 eV
};

/// Per-pair Bohr frequencies, periods, decay constants and critical couplings.
struct DecayTable {
    std::vector<PairDecay> pairs;
    double kappa_e = 0.0;

    const PairDecay& pair(int n, int m) const;
    /// Oscillations that outlive a time tau: |E_n - E_m| < sqrt(2/(kappa tau)).
    bool survives(int n, int m, double tau_s) const;
};

/// Exact nonselective evolution under continuous energy measurement:
/// rho_nm(t) = rho_nm(0) exp(-i (E_n - E_m) t / hbar - kappa/2 (E_n - E_m)^2 t).
/// Diagonal elements are carried over untouched and Hermiticity is enforced
/// by construction.
DensityMatrix evolve_density(const DensityMatrix& rho0, const SpectralBasis& basis,
                             const MeasurementCoupling& kappa, double t);

/// <x(t)> = sum_nm rho_nm(t) <m|x|n> at the requested times (sorted,
/// nonnegative). The imaginary residue of the trace is tracked in metadata.
FluxTrace flux_trace(const DensityMatrix& rho0, const SpectralBasis& basis,
                     const MeasurementCoupling& kappa, const std::vector<double>& times_s);

/// Closed-form two-level trace for the left-localized initial state:
/// (X00 + X11)/2 + X01 cos(omega t) exp(-kappa (hbar omega)^2 t / 2).
FluxTrace two_level_flux(const SpectralBasis& basis, const MeasurementCoupling& kappa,
                         const std::vector<double>& times_s);

/// Two-level density matrix in the left/right representation, unit trace:
/// 1/2 [[1 + e c, -i e s], [i e s, 1 - e c]] with e = exp(-kappa (hbar omega)^2 t / 2).
DensityMatrix two_level_density(const SpectralBasis& basis, const MeasurementCoupling& kappa,
                                double t);

DecayTable decay_table(const Eigen::VectorXd& energies_eV, const MeasurementCoupling& kappa);
DecayTable decay_table(const SpectralBasis& basis, const MeasurementCoupling& kappa);

/// Critical coupling of the ground doublet, 1/(h (E1 - E0)).
double kappa_crit_10(const SpectralBasis& basis);
/// Critical coupling of the second doublet, 1/(h (E3 - E2)).
double kappa_crit_32(const SpectralBasis& basis);

} // namespace squidsim
