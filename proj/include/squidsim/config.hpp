#pragma once

#include <optional>
#include <string>
#include <vector>

#include "squidsim/grid.hpp"
#include "squidsim/squid_model.hpp"

namespace squidsim {

/// Experiment description, loaded from an annotated JSON file ('//' comments
/// allowed). Exactly one of the circuit / quartic parameter blocks must be
/// present; defaults encode the reference double-well setup.
struct ExperimentConfig {
    // Parameter block (exactly one).
    std::optional<CircuitParams> circuit;
    std::optional<QuarticPotential> quartic;

    // Capacitance: fixed value, or calibrated against a target ground energy.
    struct Capacitance {
        bool calibrate = true;
        double value_F = 1.0e-16;
        double target_e0_eV = -0.0440591;
        double min_F = 0.5e-16;
        double max_F = 2.0e-16;
    } capacitance;

    struct GridBlock {
        double x_min = -0.8;
        double x_max = 0.8;
        int n_points = 4001;
    } grid;

    int n_levels = 8;

    enum class PotentialModel { quartic_well, harmonic_fit };
    /// harmonic_fit replaces the well by its curvature at the minima
    /// (V = mu x^2); used as a solver self-test.
    PotentialModel potential_model = PotentialModel::quartic_well;

    struct InitialState {
        enum class Kind { gaussian, left, right };
        Kind kind = Kind::gaussian;
        double x_m = -0.27;
        double sigma_x = 0.06;
    } initial_state;

    struct Sweep {
        enum class Unit { crit10, crit32 };
        Unit unit = Unit::crit32;
        std::vector<double> multipliers = {0.0, 1e-2, 1e-1, 10.0, 1e2, 1e3};
    } sweep;

    struct TimeBlock {
        double span_T10 = 10.0;
        int samples = 2000;
    } time;

    struct TrajectoryBlock {
        bool present = false;
        int n_trajectories = 10000;
        std::uint64_t seed = 20260810;
        double dt_T10 = 1e-3;
        double t_max_T10 = 6.0;
        int samples = 121;
    } trajectories;

    double temperature_K = 4.0;
    std::string output_dir = "out";
    bool emit_plot_script = true;

    void validate() const;
};

ExperimentConfig default_config();

/// Parse and validate; throws ConfigError with a readable message.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

} // namespace squidsim
