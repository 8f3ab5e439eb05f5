#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bangbang/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bang-bang elliptic optimal control: solve, verify optimality "
                 "structure, and measure perturbation stability"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int threads = 1;
    std::uint64_t seed_override = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "problem configuration file")->required();
        cmd->add_option("--out", out_override, "output directory (overrides the config)");
        cmd->add_option("--threads", threads, "worker threads for sampling and sweep loops")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed_override, "master seed (overrides the config)")
            ->each([&](const std::string&) { seed_set = true; });
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve the control problem");
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "verify optimality structure at a stored solution");
    CLI::App* perturb_cmd =
        app.add_subcommand("perturb", "run perturbation sweeps from a stored solution");
    add_common(solve_cmd);
    add_common(analyze_cmd);
    add_common(perturb_cmd);

    CLI11_PARSE(app, argc, argv);

    bangbang::RunConfig config;
    try {
        config = bangbang::load_config(config_path);
    } catch (const bangbang::Error& e) {
        std::cerr << e.what() << '\n';
        return bangbang::ExitCode::error;
    }
    if (seed_set) config.solver.seed = seed_override;
    const std::filesystem::path out_dir = out_override.empty() ? config.output.dir : out_override;

    if (solve_cmd->parsed()) return bangbang::cmd_solve(config, out_dir, threads);
    if (analyze_cmd->parsed()) return bangbang::cmd_analyze(config, out_dir, threads);
    return bangbang::cmd_perturb(config, out_dir, threads);
}
