#include "squidsim/cli.hpp"

#include <ostream>

#include <CLI11.hpp>

#include "squidsim/experiments.hpp"

namespace squidsim {

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int levels = 0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config file (JSON)");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "override the trajectory seed");
    cmd->add_option("--levels", flags.levels, "override the basis size");
    cmd->add_flag("--quiet", flags.quiet, "suppress the summary printout");
}

ExperimentConfig resolve(const CommonFlags& flags) {
    ExperimentConfig cfg =
        flags.config_path.empty() ? default_config() : load_config(flags.config_path);
    if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
    if (flags.seed >= 0) cfg.trajectories.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.levels > 0) cfg.n_levels = flags.levels;
    cfg.validate();
    return cfg;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"rf ring double-well simulator under continuous energy measurement"};
    app.require_subcommand(1);

    CommonFlags spectrum_flags, sweep_flags, validate_flags;
    CLI::App* spectrum = app.add_subcommand("spectrum", "solve and export the energy spectrum");
    add_common(spectrum, spectrum_flags);
    CLI::App* sweep = app.add_subcommand("sweep", "flux traces across measurement couplings");
    add_common(sweep, sweep_flags);
    CLI::App* validate = app.add_subcommand("validate", "run the cross-validation battery");
    add_common(validate, validate_flags);

    try {
        // CLI11 wants argc/argv-style reversed input.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (spectrum->parsed()) {
            cmd_spectrum(resolve(spectrum_flags), out, spectrum_flags.quiet);
            return 0;
        }
        if (sweep->parsed()) {
            cmd_damping_sweep(resolve(sweep_flags), out, sweep_flags.quiet);
            return 0;
        }
        if (validate->parsed()) {
            const ValidationReport report =
                cmd_validate(resolve(validate_flags), out, validate_flags.quiet);
            return report.passed() ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace squidsim
