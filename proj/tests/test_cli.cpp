#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "squidsim/cli.hpp"
#include "squidsim/experiments.hpp"

using namespace squidsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "squidsim_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_config(const fs::path& dir, const std::string& body) {
    const fs::path path = dir / "config.json";
    std::ofstream os(path);
    os << body;
    return path.string();
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

} // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults are valid and self-consistent") {
        const ExperimentConfig cfg = default_config();
        CHECK_NOTHROW(cfg.validate());
        CHECK(cfg.quartic.has_value());
        CHECK(cfg.capacitance.calibrate);
        CHECK(cfg.sweep.multipliers.size() == 6);
    }

    SUBCASE("json round trip with comments") {
        const ExperimentConfig cfg = parse_config(R"({
            // annotated config
            "quartic": {"mu_eV": 1.80487, "lambda_eV": 14.73360},
            "capacitance": {"mode": "fixed", "value_F": 1e-16},
            "grid": {"x_min": -0.8, "x_max": 0.8, "n_points": 1001},
            "n_levels": 4,
            "initial_state": {"type": "left"},
            "sweep": {"unit": "crit10", "multipliers": [0, 1.0]},
            "time": {"span_T10": 2.0, "samples": 101},
            "output_dir": "unused"
        })");
        CHECK(cfg.n_levels == 4);
        CHECK_FALSE(cfg.capacitance.calibrate);
        CHECK(cfg.initial_state.kind == ExperimentConfig::InitialState::Kind::left);
        CHECK(cfg.sweep.unit == ExperimentConfig::Sweep::Unit::crit10);
    }

    SUBCASE("both parameter blocks rejected") {
        CHECK_THROWS_AS(parse_config(R"({
            "circuit": {"inductance_H": 6.1e-11, "critical_current_A": 2.76e-5},
            "quartic": {"mu_eV": 1.8, "lambda_eV": 14.7}
        })"),
                        ConfigError);
    }

    SUBCASE("negative sweep multiplier rejected") {
        CHECK_THROWS_AS(parse_config(R"({
            "quartic": {"mu_eV": 1.80487, "lambda_eV": 14.73360},
            "sweep": {"multipliers": [0, -1.0]}
        })"),
                        ConfigError);
    }

    SUBCASE("malformed json rejected") {
        CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
    }
}

TEST_CASE("spectrum command") {
    const fs::path dir = fresh_dir("spectrum");
    ExperimentConfig cfg = default_config();
    cfg.output_dir = (dir / "out").string();

    std::ostringstream log;
    const SpectrumOutputs out = cmd_spectrum(cfg, log, false);

    CHECK(fs::exists(out.energies_file));
    CHECK(fs::exists(out.table_file));
    CHECK(fs::exists(out.plot_script));

    const std::string energies = slurp(out.energies_file);
    CHECK(energies.find("-4.405910000") != std::string::npos); // calibrated E0
    CHECK(energies.find("even") != std::string::npos);
    CHECK(energies.find("odd") != std::string::npos);

    const std::string printed = log.str();
    CHECK(printed.find("barrier height dU_eV = 5.5274") != std::string::npos);
    CHECK(printed.find("wkb_hbar_omega_eV") != std::string::npos);
    CHECK(printed.find("thermal_ratio") != std::string::npos);

    SUBCASE("harmonic self-test mode") {
        ExperimentConfig harm = cfg;
        harm.potential_model = ExperimentConfig::PotentialModel::harmonic_fit;
        harm.capacitance.calibrate = false; // calibration target is a well quantity
        harm.output_dir = (dir / "harm").string();
        std::ostringstream hlog;
        const SpectrumOutputs hout = cmd_spectrum(harm, hlog, true);
        const double hw = std::sqrt(2.0 * 2.0 * 1.80487 * kinetic_coefficient(1e-16));
        for (int n = 0; n < 4; ++n)
            CHECK(hout.setup.basis.energy(n) == doctest::Approx(hw * (n + 0.5)).epsilon(1e-3));
    }
}

TEST_CASE("sweep command") {
    const fs::path dir = fresh_dir("sweep");
    ExperimentConfig cfg = default_config();
    cfg.output_dir = (dir / "out").string();
    cfg.time.samples = 201; // keep the suite quick

    std::ostringstream log;
    const SweepOutputs out = cmd_damping_sweep(cfg, log, false);
    CHECK(out.trace_files.size() == 6);
    for (const auto& f : out.trace_files) CHECK(fs::exists(f));
    CHECK(fs::exists(out.manifest_file));
    CHECK(fs::exists(out.plot_script));

    const std::string manifest = slurp(out.manifest_file);
    CHECK(manifest.find("kappa_crit_ratio_10_over_32") != std::string::npos);
    CHECK(manifest.find("trace_00.dat") != std::string::npos);
    CHECK(manifest.find("trace_05.dat") != std::string::npos);

    SUBCASE("manifest ratio equals the splitting ratio to 1e-12") {
        const ModelSetup setup = build_setup(cfg);
        double ratio = 0.0;
        std::istringstream is(manifest);
        std::string line;
        while (std::getline(is, line)) {
            const auto pos = line.find("kappa_crit_ratio_10_over_32 = ");
            if (pos != std::string::npos) ratio = std::stod(line.substr(pos + 30));
        }
        const double expected = setup.basis.splitting(2, 3) / setup.basis.splitting(0, 1);
        CHECK(ratio == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("byte-identical outputs on a rerun") {
        ExperimentConfig again = cfg;
        again.output_dir = (dir / "out2").string();
        std::ostringstream log2;
        const SweepOutputs out2 = cmd_damping_sweep(again, log2, true);
        for (size_t i = 0; i < out.trace_files.size(); ++i)
            CHECK(slurp(out.trace_files[i]) == slurp(out2.trace_files[i]));
        CHECK(slurp(out.manifest_file) == slurp(out2.manifest_file));
    }

    SUBCASE("single kappa, single time point") {
        ExperimentConfig tiny = cfg;
        tiny.output_dir = (dir / "tiny").string();
        tiny.sweep.multipliers = {1.0};
        tiny.time.samples = 1;
        std::ostringstream tlog;
        const SweepOutputs tout = cmd_damping_sweep(tiny, tlog, true);
        const std::string trace = slurp(tout.trace_files[0]);
        // t = 0 row carries the initial mean flux of the wavepacket.
        CHECK(trace.find("0.000000000000e+00 0.000000000000e+00 -2.68") != std::string::npos);
    }
}

TEST_CASE("validate command wiring") {
    const fs::path dir = fresh_dir("validate");
    ExperimentConfig cfg = default_config();
    cfg.output_dir = (dir / "out").string();
    cfg.trajectories.present = true;
    cfg.trajectories.n_trajectories = 300; // quick battery
    cfg.trajectories.samples = 41;
    cfg.trajectories.t_max_T10 = 3.0;

    std::ostringstream log;
    const ValidationReport report = cmd_validate(cfg, log, false);
    CHECK(report.passed());
    CHECK(fs::exists(dir / "out" / "validation.txt"));
    CHECK(fs::exists(dir / "out" / "terminal_populations.dat"));
    const std::string text = slurp((dir / "out" / "validation.txt").string());
    CHECK(text.find("closed form vs integrator") != std::string::npos);
    CHECK(text.find("monte carlo mean flux") != std::string::npos);
    CHECK(text.find("widened Monte Carlo confidence bands") != std::string::npos);
    CHECK(text.find("validation passed") != std::string::npos);

    SUBCASE("missing trajectory block is a config error") {
        ExperimentConfig no_traj = cfg;
        no_traj.trajectories.present = false;
        std::ostringstream l2;
        CHECK_THROWS_AS(cmd_validate(no_traj, l2, true), ConfigError);
    }
}

TEST_CASE("cli exit codes") {
    const fs::path dir = fresh_dir("cli");

    SUBCASE("missing config file") {
        std::string err;
        CHECK(run({"spectrum", "--config", (dir / "absent.json").string()}, nullptr, &err) == 2);
        CHECK(err.find("cannot open config") != std::string::npos);
    }

    SUBCASE("unknown subcommand") {
        CHECK(run({"frobnicate"}) == 2);
    }

    SUBCASE("corrupt kappa multiplier") {
        const std::string path = write_config(dir, R"({
            "quartic": {"mu_eV": 1.80487, "lambda_eV": 14.73360},
            "sweep": {"multipliers": [-2.0]}
        })");
        std::string err;
        CHECK(run({"sweep", "--config", path, "--out", (dir / "o").string()}, nullptr, &err) ==
              2);
        CHECK(err.find("nonnegative") != std::string::npos);
    }

    SUBCASE("spectrum runs from a config file") {
        const std::string path = write_config(dir, R"({
            // fast variant: coarse grid, fixed capacitance
            "quartic": {"mu_eV": 1.80487, "lambda_eV": 14.73360},
            "capacitance": {"mode": "fixed", "value_F": 1e-16},
            "grid": {"n_points": 1001},
            "n_levels": 4
        })");
        std::string out_text;
        CHECK(run({"spectrum", "--config", path, "--out", (dir / "s").string()}, &out_text) ==
              0);
        CHECK(out_text.find("capacitance_F = 1.000000000000e-16 (fixed)") != std::string::npos);
    }

    SUBCASE("quiet suppresses the summary") {
        const std::string path = write_config(dir, R"({
            "quartic": {"mu_eV": 1.80487, "lambda_eV": 14.73360},
            "capacitance": {"mode": "fixed", "value_F": 1e-16},
            "grid": {"n_points": 1001},
            "n_levels": 4
        })");
        std::string out_text;
        CHECK(run({"spectrum", "--config", path, "--out", (dir / "q").string(), "--quiet"},
                  &out_text) == 0);
        CHECK(out_text.empty());
    }
}
