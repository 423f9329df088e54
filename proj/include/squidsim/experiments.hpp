#pragma once

#include <iosfwd>
#include <string>

#include "squidsim/config.hpp"
#include "squidsim/verification.hpp"

namespace squidsim {

/// Everything derived from a config up to the solved spectrum.
struct ModelSetup {
    QuarticPotential quartic;
    double capacitance_F = 0.0;
    double kinetic_eV = 0.0;
    bool calibrated = false;
    Grid grid;
    SpectralBasis basis;
};

/// Bisect the capacitance until the ground energy matches target_e0 (the
/// ground energy decreases monotonically with capacitance). Throws
/// ConvergenceFailure when the range does not bracket the target.
double calibrate_capacitance(const QuarticPotential& q, const Grid& grid,
                             double target_e0_eV, double c_min_F, double c_max_F);

ModelSetup build_setup(const ExperimentConfig& config);

/// Initial density matrix described by the config block.
DensityMatrix initial_density(const ExperimentConfig& config, const SpectralBasis& basis,
                              std::ostream& log, bool quiet);

struct SpectrumOutputs {
    std::string energies_file;
    std::string table_file;
    std::string plot_script;
    ModelSetup setup;
    ConvergenceReport convergence;
};

/// Solve the spectrum, write the eigenvalue and eigenfunction tables and a
/// plot script, and print the well summary. Throws GridTooCoarse when the
/// convergence study flags the grid.
SpectrumOutputs cmd_spectrum(const ExperimentConfig& config, std::ostream& log,
                             bool quiet = false);

struct SweepOutputs {
    std::vector<std::string> trace_files;
    std::string manifest_file;
    std::string plot_script;
};

/// One flux trace per sweep multiplier plus a manifest with the critical
/// couplings and decay-constant tables.
SweepOutputs cmd_damping_sweep(const ExperimentConfig& config, std::ostream& log,
                               bool quiet = false);

/// Cross-validation battery (closed form vs integrator vs Monte Carlo plus
/// the exact-solution invariants); writes the report and the per-trajectory
/// terminal populations.
ValidationReport cmd_validate(const ExperimentConfig& config, std::ostream& log,
                              bool quiet = false);

} // namespace squidsim
