#pragma once

#include <cstdint>
#include <vector>

#include "bangbang/objective.hpp"

namespace bangbang {

struct SolveOptions {
    int max_iters = 500;
    double gap_tol = 1e-8;        // stopping threshold on the VI gap
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
    std::uint64_t seed = 0;       // reserved for randomized tie-breaking
};

struct IterationRecord {
    int iter = 0;
    double j = 0.0;           // cost at this iterate
    double gap = 0.0;         // VI gap at this iterate
    double step = 0.0;        // Armijo step that produced this iterate (0 for the start)
    double bb_residual = 0.0; // measure where the iterate is strictly interior
};

struct SolveTrace {
    std::vector<IterationRecord> iterations;
    EvaluatedControl final_control;
    bool converged = false;
};

/// Exact minimizer of the linear functional v -> (phi, v) over the box:
/// lower where phi > 0, upper where phi < 0, midpoint on exact ties.
GridFunction linearized_minimizer(const GridFunction& phi, const Bounds& b);

/// First-order residual gap(u) = (phi_u, u - linearized_minimizer(phi_u)).
/// Nonnegative; zero exactly when the discrete first-order system holds.
double vi_gap(const EvaluatedControl& ec, const Bounds& b);

/// Conditional-gradient loop on J over the admissible box. The linear
/// subproblem is solved exactly by the bang-bang sign rule, so iterates move
/// toward two-level structure without regularization. Armijo backtracking on
/// the true cost keeps descent monotone.
SolveTrace solve(const ProblemSpec& spec, const SolveOptions& opts, const GridFunction& u0);

/// Same loop on the perturbed cost; fixed points satisfy the perturbed
/// first-order system. With e = (0,0) this reproduces solve() bit for bit.
SolveTrace solve_perturbed(const ProblemSpec& spec, const Perturbation& e,
                           const SolveOptions& opts, const GridFunction& u0);

} // namespace bangbang
