#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "sep1d/config.hpp"
#include "sep1d/diagnostics.hpp"
#include "sep1d/ensemble.hpp"
#include "sep1d/integrator.hpp"
#include "sep1d/io.hpp"
#include "sep1d/perturbation.hpp"
#include "sep1d/steady.hpp"
#include "sep1d/verify.hpp"

namespace fs = std::filesystem;
using namespace sep1d;

namespace {

// Exit-code contract: 0 ok, 1 config, 2 steady-solve failure, 3 path failure,
// 4 partial ensemble.
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSteadyError = 2;
constexpr int kPathError = 3;
constexpr int kPartialEnsemble = 4;

struct SteadyBundle {
    SteadyState state;
    SteadySolveReport report;
};

SteadyBundle solve_steady(const RunConfig& cfg, const Grid& grid, const PressureLaw& law,
                          const DopingProfile& doping) {
    if (cfg.voltage_mode) {
        auto [st, rep] = solve_given_voltage(grid, law, doping, cfg.make_boundary(),
                                             cfg.make_steady_options());
        return {st, rep};
    }
    auto [st, rep] =
        solve_given_current_report(grid, law, doping, cfg.rho_left, cfg.rho_right,
                                   cfg.jbar, cfg.phi_left, cfg.make_steady_options());
    return {st, rep};
}

int cmd_steady(const RunConfig& cfg, const std::string& out_dir,
               const std::string& weights_path) {
    const Grid grid = cfg.make_grid();
    const PressureLaw law = cfg.make_law();
    const DopingProfile doping = cfg.make_doping(grid);
    SteadyBundle sb;
    try {
        sb = solve_steady(cfg, grid, law, doping);
    } catch (const SimError& err) {
        std::cerr << "steady solve failed: " << err.what() << "\n";
        return kSteadyError;
    }
    const auto [momentum, poisson] = steady_residual(sb.state, law, doping);
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "steady.json");
    write_steady_json(out, law, sb.state, sb.report, momentum, poisson);
    std::cout << "steady state: J_bar = " << fmt_g17(sb.state.J_bar)
              << ", subsonic margin = " << fmt_g17(sb.state.subsonic_margin)
              << ", residual = " << fmt_g17(sb.state.residual_norm) << "\n";

    if (!weights_path.empty()) {
        const SymmetrizerWeights w = make_symmetrizer_weights(sb.state, law);
        std::ofstream wout(weights_path);
        write_weights_csv(wout, grid, w);
    }
    return kOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    const Grid grid = cfg.make_grid();
    const PressureLaw law = cfg.make_law();
    const DopingProfile doping = cfg.make_doping(grid);
    SteadyBundle sb;
    try {
        sb = solve_steady(cfg, grid, law, doping);
    } catch (const SimError& err) {
        std::cerr << "steady solve failed: " << err.what() << "\n";
        return kSteadyError;
    }

    RngStream rng(cfg.master_seed, 0);
    PathRecord rec;
    try {
        const FlowField initial =
            initial_perturbation(grid, sb.state, law, doping, cfg.perturbation_amplitude,
                                 cfg.perturbation_modes, rng);
        rec = simulate(initial, grid, cfg.make_integrator(), law, doping, sb.state,
                       cfg.make_noise(), rng);
    } catch (const SimError& err) {
        std::cerr << "path failed before the first step: " << err.what() << "\n";
        return kPathError;
    }

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "run.csv");
        write_run_csv(out, rec);
    }
    for (const auto& [step_index, field] : rec.snapshots) {
        std::ofstream out(fs::path(out_dir) /
                          ("snap_" + std::to_string(step_index) + ".csv"));
        write_snapshot_csv(out, grid, field);
    }
    if (!rec.failure.empty()) {
        std::cerr << "path failed at t = " << fmt_g17(rec.last_good_time) << ": "
                  << rec.failure << "\n";
        return kPathError;
    }
    std::cout << "simulated to t = " << fmt_g17(rec.frames.back().t) << " ("
              << rec.frames.size() << " frames";
    if (rec.supersonic_warnings > 0)
        std::cout << ", " << rec.supersonic_warnings << " supersonic warnings";
    std::cout << ")\n";
    return kOk;
}

int cmd_ensemble(const RunConfig& cfg, const std::string& out_dir) {
    EnsembleInputs in;
    in.grid = cfg.make_grid();
    in.law = cfg.make_law();
    in.doping = cfg.make_doping(in.grid);
    try {
        in.steady = solve_steady(cfg, in.grid, in.law, in.doping).state;
    } catch (const SimError& err) {
        std::cerr << "steady solve failed: " << err.what() << "\n";
        return kSteadyError;
    }
    in.integrator = cfg.make_integrator();
    in.noise = cfg.make_noise();
    in.perturbation_amplitude = cfg.perturbation_amplitude;
    in.perturbation_modes = cfg.perturbation_modes;

    const EnsembleSummary summary = run_ensemble(in, cfg.make_ensemble());
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "summary.json");
    write_summary_json(out, summary, &cfg);
    std::cout << "ensemble: " << summary.n_paths - summary.n_failed << "/"
              << summary.n_paths << " paths completed";
    for (const auto& [m, fit] : summary.fits)
        std::cout << "; zeta_" << m << " = " << fmt_g17(fit.zeta_hat);
    std::cout << "\n";
    if (summary.partial) {
        std::cerr << "more than 5% of paths failed; summary flagged partial\n";
        return kPartialEnsemble;
    }
    return kOk;
}

int cmd_verify(const std::string& suite) {
    std::vector<std::string> to_run;
    if (suite == "all") {
        to_run = verify::suite_names();
    } else {
        if (verify::suites().find(suite) == verify::suites().end()) {
            std::cerr << "unknown suite '" << suite << "'; available:";
            for (const std::string& name : verify::suite_names())
                std::cerr << " " << name;
            std::cerr << " all\n";
            return kConfigError;
        }
        to_run.push_back(suite);
    }

    bool all_pass = true;
    std::printf("%-14s %-44s %-6s %s\n", "suite", "check", "result", "detail");
    for (const std::string& name : to_run) {
        for (const verify::CheckResult& r : verify::run_suite(name)) {
            std::printf("%-14s %-44s %-6s %s\n", name.c_str(), r.name.c_str(),
                        r.pass ? "PASS" : "FAIL", r.detail.c_str());
            all_pass = all_pass && r.pass;
        }
    }
    std::printf("%s\n", all_pass ? "all checks passed" : "some checks FAILED");
    return all_pass ? kOk : kPathError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D stochastic Euler-Poisson semiconductor laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_override, weights_path, suite = "all";
    std::uint64_t seed = 0;
    std::size_t paths = 0;

    CLI::App* steady = app.add_subcommand("steady", "solve the subsonic steady state");
    steady->add_option("--config", config_path, "configuration file")->required();
    steady->add_option("--out", out_override, "output directory");
    steady->add_option("--weights", weights_path, "also export symmetrizer weights CSV");

    CLI::App* simulate = app.add_subcommand("simulate", "integrate one forced path");
    simulate->add_option("--config", config_path, "configuration file")->required();
    simulate->add_option("--seed", seed, "override ensemble.master_seed");
    simulate->add_option("--out", out_override, "output directory");

    CLI::App* ensemble = app.add_subcommand("ensemble", "run a path ensemble");
    ensemble->add_option("--config", config_path, "configuration file")->required();
    ensemble->add_option("--seed", seed, "override ensemble.master_seed");
    ensemble->add_option("--paths", paths, "override ensemble.n_paths");
    ensemble->add_option("--out", out_override, "output directory");

    CLI::App* verify_cmd = app.add_subcommand("verify", "run invariant check suites");
    verify_cmd->add_option("--suite", suite, "suite name or 'all'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (verify_cmd->parsed()) return cmd_verify(suite);

        RunConfig cfg = RunConfig::from_file(config_path);
        if (simulate->count("--seed") || ensemble->count("--seed"))
            cfg.master_seed = seed;
        if (ensemble->count("--paths")) cfg.n_paths = paths;
        const std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;

        if (steady->parsed()) return cmd_steady(cfg, out_dir, weights_path);
        if (simulate->parsed()) return cmd_simulate(cfg, out_dir);
        if (ensemble->parsed()) return cmd_ensemble(cfg, out_dir);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kConfigError;
    } catch (const SimError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kPathError;
    }
    return kConfigError;
}
