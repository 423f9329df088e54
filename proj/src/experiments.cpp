#include "squidsim/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

namespace squidsim {

namespace fs = std::filesystem;

namespace {

std::function<double(double)> model_potential(const ExperimentConfig& config,
                                              const QuarticPotential& q) {
    if (config.potential_model == ExperimentConfig::PotentialModel::harmonic_fit) {
        const double mu = q.mu;
        return [mu](double x) { return mu * x * x; }; // 1/2 * V''(x+-) * x^2
    }
    return [q](double x) { return potential_quartic_depth(x, q); };
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw SquidError("cannot write " + path.string());
    return os;
}

std::vector<double> sample_times(double span_s, int samples) {
    std::vector<double> times(samples);
    if (samples == 1) {
        times[0] = 0.0;
        return times;
    }
    for (int i = 0; i < samples; ++i)
        times[i] = span_s * static_cast<double>(i) / (samples - 1);
    return times;
}

const char* parity_name(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        default: return "none";
    }
}

} // namespace

double calibrate_capacitance(const QuarticPotential& q, const Grid& grid,
                             double target_e0_eV, double c_min_F, double c_max_F) {
    const auto pot = [q](double x) { return potential_quartic_depth(x, q); };
    const auto ground = [&](double c) {
        return solve_spectrum(grid, kinetic_coefficient(c), pot, 1).energy(0);
    };
    double lo = c_min_F, hi = c_max_F;
    double e_lo = ground(lo), e_hi = ground(hi);
    // E0 decreases with capacitance (smaller zero-point energy).
    if (!(e_lo >= target_e0_eV && target_e0_eV >= e_hi))
        throw ConvergenceFailure("capacitance scan range does not bracket the target ground energy");
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double e_mid = ground(mid);
        if (std::abs(e_mid - target_e0_eV) < 1e-12) return mid;
        if (e_mid > target_e0_eV)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) / hi < 1e-14) break;
    }
    return 0.5 * (lo + hi);
}

ModelSetup build_setup(const ExperimentConfig& config) {
    config.validate();
    ModelSetup setup;
    setup.quartic = config.quartic ? *config.quartic : to_quartic(*config.circuit);
    setup.grid = Grid(config.grid.x_min, config.grid.x_max, config.grid.n_points);

    if (config.capacitance.calibrate) {
        setup.capacitance_F = calibrate_capacitance(setup.quartic, setup.grid,
                                                    config.capacitance.target_e0_eV,
                                                    config.capacitance.min_F,
                                                    config.capacitance.max_F);
        setup.calibrated = true;
    } else if (config.circuit && config.circuit->capacitance) {
        setup.capacitance_F = *config.circuit->capacitance;
    } else {
        setup.capacitance_F = config.capacitance.value_F;
    }
    setup.kinetic_eV = kinetic_coefficient(setup.capacitance_F);
    setup.basis = solve_spectrum(setup.grid, setup.kinetic_eV,
                                 model_potential(config, setup.quartic), config.n_levels);
    return setup;
}

DensityMatrix initial_density(const ExperimentConfig& config, const SpectralBasis& basis,
                              std::ostream& log, bool quiet) {
    using Kind = ExperimentConfig::InitialState::Kind;
    switch (config.initial_state.kind) {
        case Kind::left:
            return make_lr_state(Side::left, basis);
        case Kind::right:
            return make_lr_state(Side::right, basis);
        case Kind::gaussian:
        default: {
            const GaussianSpec spec{config.initial_state.x_m, config.initial_state.sigma_x};
            const ProjectedState state = project(make_gaussian(spec, basis.grid()), basis);
            if (state.low_capture() && !quiet)
                log << "note: captured norm " << fmt(state.captured_norm)
                    << " below 0.99 at " << basis.n_levels() << " levels\n";
            DensityMatrix rho = density_from_projection(state);
            rho.basis = &basis;
            rho.state_label = spec.label();
            return rho;
        }
    }
}

SpectrumOutputs cmd_spectrum(const ExperimentConfig& config, std::ostream& log, bool quiet) {
    SpectrumOutputs out;
    out.setup = build_setup(config);
    const SpectralBasis& basis = out.setup.basis;
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    const WellGeometry geom = well_geometry(out.setup.quartic, out.setup.capacitance_F);
    const WkbEstimate wkb = wkb_frequency(geom);
    const double split10 = basis.splitting(0, 1);

    out.convergence = convergence_study(out.setup.grid, out.setup.kinetic_eV,
                                        model_potential(config, out.setup.quartic),
                                        std::max(4, config.n_levels));

    // Eigenvalue table.
    {
        auto os = open_output(dir / "energies.dat");
        os << "# energy levels\n";
        os << "# capacitance_F = " << fmt(out.setup.capacitance_F)
           << (out.setup.calibrated ? " (calibrated)" : " (fixed)") << "\n";
        os << "# kinetic_coefficient_eV = " << fmt(out.setup.kinetic_eV) << "\n";
        os << "# columns: n E_eV parity\n";
        for (int n = 0; n < basis.n_levels(); ++n)
            os << n << " " << fmt(basis.energy(n)) << " "
               << parity_name(basis.parities()[n]) << "\n";
        out.energies_file = (dir / "energies.dat").string();
    }

    // Potential and eigenfunction table for plotting.
    {
        auto os = open_output(dir / "spectrum.dat");
        const int n_plot = std::min(4, basis.n_levels());
        os << "# columns: x V_depth_eV";
        for (int n = 0; n < n_plot; ++n) os << " phi_" << n;
        os << "\n";
        const Eigen::VectorXd x = out.setup.grid.points();
        const auto pot = model_potential(config, out.setup.quartic);
        for (int i = 0; i < x.size(); ++i) {
            os << fmt(x[i]) << " " << fmt(pot(x[i]));
            for (int n = 0; n < n_plot; ++n) os << " " << fmt(basis.eigenfunctions()(n, i));
            os << "\n";
        }
        out.table_file = (dir / "spectrum.dat").string();
    }

    if (config.emit_plot_script) {
        auto os = open_output(dir / "plot_spectrum.gp");
        os << "set terminal pngcairo size 900,700\n";
        os << "set output 'spectrum.png'\n";
        os << "set xlabel 'x'\nset ylabel 'energy (eV)'\n";
        os << "phi_scale = 0.004\n";
        os << "plot 'spectrum.dat' u 1:2 w l lw 2 title 'V(x) - V0'";
        const int n_plot = std::min(4, basis.n_levels());
        for (int n = 0; n < n_plot; ++n)
            os << ", \\\n     'spectrum.dat' u 1:(phi_scale*$" << (3 + n) << " + "
               << fmt(basis.energy(n)) << ") w l title 'phi_" << n << "'";
        os << "\n";
        out.plot_script = (dir / "plot_spectrum.gp").string();
    }

    if (!quiet) {
        log << "well minima x = +-" << fmt(geom.minima_x.second) << "\n";
        log << "barrier height dU_eV = " << fmt(geom.barrier_height) << "\n";
        log << "zero-point energy hw0_eV = " << fmt(geom.zero_point_energy) << "\n";
        log << "capacitance_F = " << fmt(out.setup.capacitance_F)
            << (out.setup.calibrated ? " (calibrated)" : " (fixed)") << "\n";
        for (int n = 0; n < basis.n_levels(); ++n)
            log << "E" << n << "_eV = " << fmt(basis.energy(n)) << " ("
                << parity_name(basis.parities()[n]) << ")\n";
        log << "splitting_10_eV = " << fmt(split10) << "\n";
        if (basis.n_levels() >= 4)
            log << "splitting_32_eV = " << fmt(basis.splitting(2, 3)) << "\n";
        log << "wkb_hbar_omega_eV = " << fmt(wkb.hbar_omega)
            << "  (ratio to exact splitting " << fmt(wkb.hbar_omega / split10) << ")\n";
        log << "thermal_ratio(T=" << config.temperature_K
            << " K) = " << fmt(thermal_ratio(geom, config.temperature_K)) << "\n";
        log << "splitting drift between two finest grids = "
            << fmt(out.convergence.split10_drift_rel) << "\n";
    }

    ensure_grid_converged(out.convergence);
    return out;
}

SweepOutputs cmd_damping_sweep(const ExperimentConfig& config, std::ostream& log, bool quiet) {
    const ModelSetup setup = build_setup(config);
    const SpectralBasis& basis = setup.basis;
    if (basis.n_levels() < 4)
        throw std::invalid_argument("sweep needs at least four levels for the critical couplings");
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    const double kc10 = kappa_crit_10(basis);
    const double kc32 = kappa_crit_32(basis);
    const double unit =
        config.sweep.unit == ExperimentConfig::Sweep::Unit::crit10 ? kc10 : kc32;

    const DensityMatrix rho0 = initial_density(config, basis, log, quiet);
    const double t10 = basis.tunneling_period();
    const std::vector<double> times = sample_times(config.time.span_T10 * t10,
                                                   config.time.samples);

    SweepOutputs out;
    const int n_sweep = static_cast<int>(config.sweep.multipliers.size());
    std::vector<FluxTrace> traces(n_sweep);

    // Sweep entries are independent; dispatch to a small worker pool and keep
    // the file writes in index order afterwards.
    {
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n_sweep) break;
                const MeasurementCoupling kappa(config.sweep.multipliers[i] * unit);
                traces[i] = flux_trace(rho0, basis, kappa, times);
            }
        };
        const int n_threads = std::max(1, std::min<int>(n_sweep,
            static_cast<int>(std::thread::hardware_concurrency())));
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (int i = 0; i < n_sweep; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "trace_%02d.dat", i);
        auto os = open_output(dir / name);
        traces[i].write(os);
        out.trace_files.push_back((dir / name).string());
    }

    {
        auto os = open_output(dir / "manifest.txt");
        os << "# damping sweep manifest\n";
        os << "# initial_state = " << rho0.state_label << "\n";
        os << "# T10_s = " << fmt(t10) << "\n";
        os << "# splitting_10_eV = " << fmt(basis.splitting(0, 1)) << "\n";
        os << "# splitting_32_eV = " << fmt(basis.splitting(2, 3)) << "\n";
        os << "# kappa_crit_10 = " << fmt(kc10) << "\n";
        os << "# kappa_crit_32 = " << fmt(kc32) << "\n";
        os << "# kappa_crit_ratio_10_over_32 = " << fmt(kc10 / kc32) << "\n";
        os << "# columns: index kappa_e kappa_over_crit10 kappa_over_crit32 file\n";
        for (int i = 0; i < n_sweep; ++i) {
            const double k = config.sweep.multipliers[i] * unit;
            char name[32];
            std::snprintf(name, sizeof(name), "trace_%02d.dat", i);
            os << i << " " << fmt(k) << " " << fmt(k / kc10) << " " << fmt(k / kc32)
               << " " << name << "\n";
        }
        os << "# tau table: sweep_index n m tau_nm_s\n";
        for (int i = 0; i < n_sweep; ++i) {
            const MeasurementCoupling kappa(config.sweep.multipliers[i] * unit);
            const DecayTable table = decay_table(basis, kappa);
            for (const auto& p : table.pairs)
                os << i << " " << p.n << " " << p.m << " " << fmt(p.tau) << "\n";
        }
        out.manifest_file = (dir / "manifest.txt").string();
    }

    if (config.emit_plot_script) {
        auto os = open_output(dir / "plot_sweep.gp");
        const int cols = (n_sweep + 1) / 2;
        os << "set terminal pngcairo size 1600,900\n";
        os << "set output 'sweep_panels.png'\n";
        os << "set multiplot layout 2," << cols << "\n";
        os << "set xlabel 't / T10'\nset ylabel '<x>'\n";
        const char* unit_name =
            config.sweep.unit == ExperimentConfig::Sweep::Unit::crit10 ? "kc10" : "kc32";
        for (int i = 0; i < n_sweep; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "trace_%02d.dat", i);
            os << "plot '" << name << "' u 2:3 w l lw 1 title 'kappa_E = "
               << config.sweep.multipliers[i] << " " << unit_name << "'\n";
        }
        os << "unset multiplot\n";
        out.plot_script = (dir / "plot_sweep.gp").string();
    }

    if (!quiet)
        log << "wrote " << n_sweep << " traces to " << dir.string() << "\n";
    return out;
}

ValidationReport cmd_validate(const ExperimentConfig& config, std::ostream& log, bool quiet) {
    if (!config.trajectories.present)
        throw ConfigError("validate needs a trajectories block in the config");
    const ModelSetup setup = build_setup(config);
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);

    ValidationOptions options;
    options.n_trajectories = config.trajectories.n_trajectories;
    options.seed = config.trajectories.seed;
    options.mc_samples = config.trajectories.samples;
    options.mc_span_T10 = config.trajectories.t_max_T10;

    const ValidationReport report = run_validation_battery(setup.basis, options);
    {
        auto os = open_output(dir / "validation.txt");
        report.write(os);
    }
    if (report.mc_result) {
        auto os = open_output(dir / "terminal_populations.dat");
        report.mc_result->write_terminal_populations(os);
    }
    if (!quiet) report.write(log);
    return report;
}

} // namespace squidsim
