#include "squidsim/config.hpp"

#include <fstream>

#include <json.hpp>

namespace squidsim {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig::InitialState parse_initial_state(const json& j) {
    ExperimentConfig::InitialState state;
    const std::string kind = j.value("type", "gaussian");
    if (kind == "gaussian") {
        state.kind = ExperimentConfig::InitialState::Kind::gaussian;
        read_if(j, "x_m", state.x_m);
        read_if(j, "sigma_x", state.sigma_x);
    } else if (kind == "left") {
        state.kind = ExperimentConfig::InitialState::Kind::left;
    } else if (kind == "right") {
        state.kind = ExperimentConfig::InitialState::Kind::right;
    } else {
        throw ConfigError("initial_state.type must be gaussian, left or right");
    }
    return state;
}

} // namespace

void ExperimentConfig::validate() const {
    if (circuit.has_value() == quartic.has_value())
        throw ConfigError("exactly one of the circuit / quartic blocks must be present");
    if (circuit) circuit->validate();
    if (quartic) quartic->validate();
    if (!capacitance.calibrate && !(capacitance.value_F > 0.0))
        throw ConfigError("capacitance must be positive");
    if (capacitance.calibrate &&
        !(capacitance.min_F > 0.0 && capacitance.max_F > capacitance.min_F))
        throw ConfigError("capacitance calibration range is empty");
    if (n_levels < 2) throw ConfigError("need at least two levels");
    for (double m : sweep.multipliers)
        if (!(m >= 0.0)) throw ConfigError("kappa multipliers must be nonnegative");
    if (sweep.multipliers.empty()) throw ConfigError("sweep needs at least one multiplier");
    if (!(time.span_T10 > 0.0)) throw ConfigError("time span must be positive");
    if (time.samples < 1) throw ConfigError("need at least one time sample");
    if (initial_state.kind == InitialState::Kind::gaussian &&
        !(initial_state.sigma_x > 0.0))
        throw ConfigError("gaussian width must be positive");
    if (trajectories.present) {
        if (trajectories.n_trajectories < 1)
            throw ConfigError("trajectory count must be positive");
        if (!(trajectories.dt_T10 > 0.0) || !(trajectories.t_max_T10 > 0.0))
            throw ConfigError("trajectory dt and t_max must be positive");
    }
    if (!(temperature_K >= 0.0)) throw ConfigError("temperature must be nonnegative");
    Grid(grid.x_min, grid.x_max, grid.n_points); // throws on a bad grid
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.quartic = QuarticPotential(1.80487, 14.73360);
    cfg.trajectories.present = true;
    return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.trajectories.present = false;
    try {
        if (j.contains("circuit")) {
            const json& c = j.at("circuit");
            CircuitParams params;
            params.inductance = c.at("inductance_H").get<double>();
            params.critical_current = c.at("critical_current_A").get<double>();
            if (c.contains("capacitance_F")) params.capacitance = c.at("capacitance_F").get<double>();
            params.external_flux =
                c.value("external_flux_over_phi0", 0.5) * params.flux_quantum;
            cfg.circuit = params;
        }
        if (j.contains("quartic")) {
            const json& q = j.at("quartic");
            cfg.quartic = QuarticPotential(q.at("mu_eV").get<double>(),
                                           q.at("lambda_eV").get<double>());
        }
        if (j.contains("capacitance")) {
            const json& c = j.at("capacitance");
            const std::string mode = c.value("mode", "calibrate");
            if (mode == "fixed") {
                cfg.capacitance.calibrate = false;
                read_if(c, "value_F", cfg.capacitance.value_F);
            } else if (mode == "calibrate") {
                cfg.capacitance.calibrate = true;
                read_if(c, "target_e0_eV", cfg.capacitance.target_e0_eV);
                read_if(c, "min_F", cfg.capacitance.min_F);
                read_if(c, "max_F", cfg.capacitance.max_F);
            } else {
                throw ConfigError("capacitance.mode must be fixed or calibrate");
            }
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            read_if(g, "x_min", cfg.grid.x_min);
            read_if(g, "x_max", cfg.grid.x_max);
            read_if(g, "n_points", cfg.grid.n_points);
        }
        read_if(j, "n_levels", cfg.n_levels);
        if (j.contains("potential_model")) {
            const std::string m = j.at("potential_model").get<std::string>();
            if (m == "quartic_well")
                cfg.potential_model = ExperimentConfig::PotentialModel::quartic_well;
            else if (m == "harmonic_fit")
                cfg.potential_model = ExperimentConfig::PotentialModel::harmonic_fit;
            else
                throw ConfigError("potential_model must be quartic_well or harmonic_fit");
        }
        if (j.contains("initial_state"))
            cfg.initial_state = parse_initial_state(j.at("initial_state"));
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            const std::string unit = s.value("unit", "crit32");
            if (unit == "crit10")
                cfg.sweep.unit = ExperimentConfig::Sweep::Unit::crit10;
            else if (unit == "crit32")
                cfg.sweep.unit = ExperimentConfig::Sweep::Unit::crit32;
            else
                throw ConfigError("sweep.unit must be crit10 or crit32");
            if (s.contains("multipliers"))
                cfg.sweep.multipliers = s.at("multipliers").get<std::vector<double>>();
        }
        if (j.contains("time")) {
            const json& t = j.at("time");
            read_if(t, "span_T10", cfg.time.span_T10);
            read_if(t, "samples", cfg.time.samples);
        }
        if (j.contains("trajectories")) {
            const json& t = j.at("trajectories");
            cfg.trajectories.present = true;
            read_if(t, "n", cfg.trajectories.n_trajectories);
            if (t.contains("seed"))
                cfg.trajectories.seed = t.at("seed").get<std::uint64_t>();
            read_if(t, "dt_T10", cfg.trajectories.dt_T10);
            read_if(t, "t_max_T10", cfg.trajectories.t_max_T10);
            read_if(t, "samples", cfg.trajectories.samples);
        }
        read_if(j, "temperature_K", cfg.temperature_K);
        read_if(j, "output_dir", cfg.output_dir);
        read_if(j, "emit_plot_script", cfg.emit_plot_script);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    } catch (const NotPhysical& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

} // namespace squidsim
