#pragma once

#include <filesystem>

#include "bangbang/config.hpp"

namespace bangbang {

/// Exit codes shared by the three pipelines.
/// 0: success (solve converged / all checks passed / all verdicts fine)
/// 1: configuration, input, or solver error
/// 2: solve did not converge (artifacts still written)
/// 3: a verification check or verdict failed (reports still written)
struct ExitCode {
    static constexpr int ok = 0;
    static constexpr int error = 1;
    static constexpr int not_converged = 2;
    static constexpr int check_failed = 3;
};

/// Solve the problem; write solution.csv, state.csv, adjoint.csv, trace.csv.
int cmd_solve(const RunConfig& config, const std::filesystem::path& out_dir, int threads);

/// Verify the optimality structure at a stored solution; write analysis.json
/// and measure_fit.csv.
int cmd_analyze(const RunConfig& config, const std::filesystem::path& out_dir, int threads);

/// Run perturbation sweeps from a stored solution; write sweep_<k>.csv per
/// direction and holder_fit.json.
int cmd_perturb(const RunConfig& config, const std::filesystem::path& out_dir, int threads);

} // namespace bangbang
