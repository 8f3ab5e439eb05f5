#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "bangbang/model.hpp"
#include "bangbang/optimizer.hpp"

namespace bangbang {

/// Flat key=value configuration with named sections. Parsing is strict
/// (unknown keys are errors, messages carry line numbers) and the canonical
/// serialization materializes every key, so parse -> serialize -> parse is
/// the identity on the parsed structure.
struct ProblemConfig {
    int dim = 1;
    double x_min = 0.0, x_max = 1.0;
    int cells_x = 64;
    double y_min = 0.0, y_max = 1.0; // used only when dim == 2
    int cells_y = 2;
    std::string diffusion = "1";
    std::string f = "zero"; // zero | linear | cubic | saturating
    double f_coeff = 1.0;
    std::string cost = "tracking"; // tracking | tracking_plus_linear
    std::string y_d = "0";
    std::string w = "0"; // linear weight, tracking_plus_linear only
    std::string alpha = "-1";
    std::string beta = "1";

    bool operator==(const ProblemConfig&) const = default;
};

struct SolverConfig {
    int max_iters = 500;
    double gap_tol = 1e-8;
    std::uint64_t seed = 0; // master seed; substreams derive from it

    bool operator==(const SolverConfig&) const = default;
};

struct AnalysisConfig {
    std::optional<double> eps_min; // default: 10 * max spacing
    std::optional<double> eps_max; // default: 0.8 * ||adjoint||_inf
    int eps_points = 20;
    std::optional<double> tau;     // default: fitted 5%-of-measure threshold
    int growth_samples = 500;
    int cone_samples = 64;
    int quadratic_samples = 200;
    double quadratic_radius = 0.1;
    int constant_samples = 20;
    std::optional<std::uint64_t> seed; // substream override

    bool operator==(const AnalysisConfig&) const = default;
};

struct SweepConfig {
    std::string directions = "all"; // all | custom
    std::string d_grad = "0";       // custom direction, cost-gradient part
    std::string d_state = "0";      // custom direction, state-equation part
    double t0 = 0.1;
    double ratio = 0.5;
    int rungs = 8;
    std::optional<std::uint64_t> seed; // substream override

    bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";

    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    ProblemConfig problem;
    SolverConfig solver;
    AnalysisConfig analysis;
    SweepConfig sweep;
    OutputConfig output;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string canonical_serialize(const RunConfig& config);

/// Materialize the continuous problem described by the config. Expression or
/// consistency problems surface as ConfigError naming the offending field.
ProblemSpec build_problem(const ProblemConfig& pc);

SolveOptions build_solve_options(const SolverConfig& sc);

/// Substream seeds for the two sampling stages, honoring per-section
/// overrides.
std::uint64_t analysis_seed(const RunConfig& config);
std::uint64_t sweep_seed(const RunConfig& config);

} // namespace bangbang
