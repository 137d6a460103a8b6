// Command-line front end: solve, newton, check, verify, slice, inspect.
//
// Exit codes: 0 success, 1 other failure (verify violations, runtime errors),
// 2 configuration error, 3 hypothesis failure, 4 solver failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "weingarten/errors.hpp"
#include "weingarten/run.hpp"

namespace run = weingarten::run;

int main(int argc, char** argv) {
    CLI::App app{"Prescribed Weingarten curvature solver for starshaped graphs in warped products"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "seed for randomized sweeps (overrides config)");

    auto* solve = app.add_subcommand("solve", "continuation from the slice z = t0 to the target psi");
    auto* newton = app.add_subcommand("newton", "single damped Newton solve from a constant field");
    auto* check = app.add_subcommand("check", "print the hypothesis report as JSON");
    auto* verify = app.add_subcommand("verify", "property and oracle sweeps");
    auto* slice = app.add_subcommand("slice", "point geometry of a slice (default z = t0)");
    auto* inspect = app.add_subcommand("inspect", "point geometry of a stored field at a node");

    std::optional<double> slice_t;
    slice->add_option("--t", slice_t, "slice height");
    std::string field;
    long node = 0;
    inspect->add_option("--field", field, "solution.csv to read")->required()->check(CLI::ExistingFile);
    inspect->add_option("--node", node, "node index (row-major)");
    for (auto* sub : {solve, newton, check, verify, slice, inspect}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // usage errors count as configuration errors; --help stays 0
        const int code = app.exit(e);
        return code == 0 ? run::ok : run::config_error;
    }

    try {
        run::RunConfig cfg = config_path.empty() ? run::RunConfig{} : run::load_config(config_path);
        if (out_dir) cfg.output = *out_dir;
        if (seed) cfg.seed = *seed;

        if (!slice->parsed() && !inspect->parsed()) {
            std::filesystem::create_directories(cfg.output);
            std::ofstream(std::filesystem::path(cfg.output) / "config.json", std::ios::binary)
                << run::echo_config(cfg) << "\n";
        }

        if (solve->parsed()) return run::run_solve(cfg, std::cout);
        if (newton->parsed()) return run::run_newton(cfg, std::cout);
        if (check->parsed()) return run::run_check(cfg, std::cout);
        if (verify->parsed()) return run::run_verify(cfg, std::cout);
        if (slice->parsed()) return run::run_slice(cfg, slice_t, std::cout);
        if (inspect->parsed()) return run::run_inspect(cfg, field, node, std::cout);
    } catch (const weingarten::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return run::config_error;
    } catch (const weingarten::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return run::config_error;
    } catch (const weingarten::ValidationError& e) {
        std::cerr << "hypothesis failure: " << e.what() << "\n";
        return run::hypothesis_failure;
    } catch (const weingarten::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return run::solver_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return run::failure;
    }
    return run::failure;
}
