#include "bangbang/optimizer.hpp"

#include <utility>

namespace bangbang {

GridFunction linearized_minimizer(const GridFunction& phi, const Bounds& b) {
    require_same_grid(phi, b.lower());
    std::vector<double> v(phi.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (phi[k] > 0.0)
            v[k] = b.lower()[k];
        else if (phi[k] < 0.0)
            v[k] = b.upper()[k];
        else
            v[k] = 0.5 * (b.lower()[k] + b.upper()[k]);
    }
    return GridFunction(phi.grid_ptr(), std::move(v));
}

double vi_gap(const EvaluatedControl& ec, const Bounds& b) {
    GridFunction v = linearized_minimizer(ec.adjoint, b);
    return inner_product(ec.adjoint, sub(ec.u, v));
}

namespace {

template <class Evaluate>
SolveTrace conditional_gradient(const ProblemSpec& spec, const SolveOptions& opts,
                                const GridFunction& u0, Evaluate&& evaluate) {
    const Bounds& bounds = spec.bounds();
    GridFunction u = project_admissible(u0, bounds);
    EvaluatedControl ec = evaluate(u);

    std::vector<IterationRecord> iterations;
    bool converged = false;
    double last_step = 0.0;

    for (int k = 0;; ++k) {
        GridFunction v = linearized_minimizer(ec.adjoint, bounds);
        const double gap = inner_product(ec.adjoint, sub(u, v));
        iterations.push_back({k, ec.value, gap, last_step, bang_bang_residual(u, bounds)});

        if (gap <= opts.gap_tol) {
            converged = true;
            break;
        }
        if (k >= opts.max_iters) break;

        // Armijo on the true cost along the convex segment toward v. The
        // directional derivative is -gap.
        double t = 1.0;
        bool accepted = false;
        EvaluatedControl ec_try = ec;
        GridFunction u_try = u;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
            u_try = project_admissible(convex_combo(u, v, t), bounds);
            ec_try = evaluate(u_try);
            if (ec_try.value <= ec.value - opts.armijo_c1 * t * gap) {
                accepted = true;
                break;
            }
            t *= opts.backtrack;
        }
        if (!accepted) break; // no descent step left at this gap level

        u = std::move(u_try);
        ec = std::move(ec_try);
        last_step = t;
    }

    return SolveTrace{std::move(iterations), std::move(ec), converged};
}

} // namespace

SolveTrace solve(const ProblemSpec& spec, const SolveOptions& opts, const GridFunction& u0) {
    return conditional_gradient(spec, opts, u0,
                                [&](const GridFunction& u) { return eval_J(spec, u); });
}

SolveTrace solve_perturbed(const ProblemSpec& spec, const Perturbation& e,
                           const SolveOptions& opts, const GridFunction& u0) {
    return conditional_gradient(
        spec, opts, u0, [&](const GridFunction& u) { return eval_perturbed(spec, u, e); });
}

} // namespace bangbang
