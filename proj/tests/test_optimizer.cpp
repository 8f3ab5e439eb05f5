#include <doctest.h>

#include <cmath>

#include "bangbang/optimizer.hpp"
#include "bangbang/rng.hpp"
#include "support/benchmarks.hpp"

using namespace bangbang;
using bangbang::testing::make_cubic_benchmark;
using bangbang::testing::make_lq_benchmark;

namespace {

GridFunction midpoint_start(const ProblemSpec& spec) {
    return convex_combo(spec.bounds().lower(), spec.bounds().upper(), 0.5);
}

SolveOptions default_opts() {
    SolveOptions o;
    o.max_iters = 2000;
    o.gap_tol = 1e-8;
    return o;
}

} // namespace

TEST_CASE("linearized minimizer follows the sign rule") {
    auto g = Grid::make_1d(0.0, 1.0, 64);
    Bounds box(GridFunction::constant(g, -1.0), GridFunction::constant(g, 1.0));

    GridFunction phi = GridFunction::sample(g, [](double x, double) { return x - 0.5; });
    GridFunction u = linearized_minimizer(phi, box);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double x = g->coord(k, 0);
        if (x < 0.5) CHECK(u[k] == 1.0);   // phi < 0: upper bound
        if (x > 0.5) CHECK(u[k] == -1.0);  // phi > 0: lower bound
        if (phi[k] == 0.0) CHECK(u[k] == 0.0);
    }

    GridFunction neg = GridFunction::constant(g, -1.0);
    GridFunction all_up = linearized_minimizer(neg, box);
    for (std::size_t k = 0; k < all_up.size(); ++k) CHECK(all_up[k] == 1.0);
}

TEST_CASE("linearized minimizer beats every admissible competitor") {
    auto g = Grid::make_1d(0.0, 1.0, 24);
    Bounds box(GridFunction::sample(g, [](double x, double) { return -1.0 - x; }),
               GridFunction::sample(g, [](double x, double) { return 0.5 + x; }));
    Prng rng(3);
    GridFunction phi =
        GridFunction::sample(g, [&](double, double) { return rng.uniform(-1.0, 1.0); });
    GridFunction best = linearized_minimizer(phi, box);
    const double best_value = inner_product(phi, best);
    for (int trial = 0; trial < 50; ++trial) {
        GridFunction w = project_admissible(
            GridFunction::sample(g, [&](double, double) { return rng.uniform(-3.0, 3.0); }), box);
        CHECK(best_value <= inner_product(phi, w) + 1e-14);
    }
}

TEST_CASE("vi gap is nonnegative and vanishes exactly at sign-consistent controls") {
    auto bench = make_lq_benchmark(16);
    Prng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        GridFunction u = project_admissible(
            GridFunction::sample(bench.spec.grid_ptr(),
                                 [&](double, double) { return rng.uniform(-1.0, 1.0); }),
            bench.spec.bounds());
        EvaluatedControl ec = eval_J(bench.spec, u);
        CHECK(vi_gap(ec, bench.spec.bounds()) >= 0.0);
    }

    // Nodewise check on a small grid: the converged control obeys the sign
    // rule at every node away from ties.
    EvaluatedControl ec = eval_J(bench.spec, bench.u_star);
    CHECK(vi_gap(ec, bench.spec.bounds()) <= 1e-12);
    for (std::size_t k = 0; k < ec.u.size(); ++k) {
        if (ec.adjoint[k] > 1e-12) CHECK(ec.u[k] == bench.spec.bounds().lower()[k]);
        if (ec.adjoint[k] < -1e-12) CHECK(ec.u[k] == bench.spec.bounds().upper()[k]);
    }
}

TEST_CASE("starting at the solution converges immediately") {
    auto bench = make_lq_benchmark(64);
    SolveTrace trace = solve(bench.spec, default_opts(), bench.u_star);
    CHECK(trace.converged);
    CHECK(trace.iterations.size() <= 2);
}

TEST_CASE("lq benchmark: bang-bang structure at convergence") {
    auto bench = make_lq_benchmark(128);
    const double h = bench.spec.grid().spacing(0);
    SolveTrace trace = solve(bench.spec, default_opts(), midpoint_start(bench.spec));
    REQUIRE(trace.converged);
    CHECK(trace.iterations.back().gap <= 1e-8);
    CHECK(trace.iterations.back().bb_residual <= 2.0 * h);
    // matches the manufactured control away from tie nodes
    double mismatch = 0.0;
    for (std::size_t k = 0; k < bench.u_star.size(); ++k)
        if (std::abs(bench.phi_star[k]) > 1e-12)
            mismatch =
                std::max(mismatch, std::abs(trace.final_control.u[k] - bench.u_star[k]));
    CHECK(mismatch == 0.0);
}

TEST_CASE("cost never increases along accepted steps") {
    ProblemSpec spec = make_cubic_benchmark(64);
    SolveTrace trace = solve(spec, default_opts(), midpoint_start(spec));
    REQUIRE(trace.converged);
    for (std::size_t i = 1; i < trace.iterations.size(); ++i)
        CHECK(trace.iterations[i].j <= trace.iterations[i - 1].j);
}

TEST_CASE("every iterate stays admissible") {
    ProblemSpec spec = make_cubic_benchmark(32);
    SolveOptions opts = default_opts();
    opts.gap_tol = 1e-30; // force the full iteration budget
    opts.max_iters = 25;
    SolveTrace trace = solve(spec, opts, midpoint_start(spec));
    const GridFunction& u = trace.final_control.u;
    for (std::size_t k = 0; k < u.size(); ++k) {
        CHECK(u[k] >= spec.bounds().lower()[k]);
        CHECK(u[k] <= spec.bounds().upper()[k]);
    }
}

TEST_CASE("solves are deterministic bit for bit") {
    ProblemSpec spec = make_cubic_benchmark(48);
    SolveTrace a = solve(spec, default_opts(), midpoint_start(spec));
    SolveTrace b = solve(spec, default_opts(), midpoint_start(spec));
    REQUIRE(a.iterations.size() == b.iterations.size());
    for (std::size_t i = 0; i < a.iterations.size(); ++i) {
        CHECK(a.iterations[i].j == b.iterations[i].j);
        CHECK(a.iterations[i].gap == b.iterations[i].gap);
        CHECK(a.iterations[i].step == b.iterations[i].step);
    }
    for (std::size_t k = 0; k < a.final_control.u.size(); ++k)
        CHECK(a.final_control.u[k] == b.final_control.u[k]);
}

TEST_CASE("zero iteration budget returns only the initial record") {
    ProblemSpec spec = make_cubic_benchmark(32);
    SolveOptions opts = default_opts();
    opts.max_iters = 0;
    SolveTrace trace = solve(spec, opts, midpoint_start(spec));
    CHECK(!trace.converged);
    CHECK(trace.iterations.size() == 1);
    CHECK(trace.iterations[0].iter == 0);
    CHECK(trace.iterations[0].step == 0.0);
}

TEST_CASE("perturbed solve with zero perturbation reproduces the plain solve bit for bit") {
    ProblemSpec spec = make_cubic_benchmark(48);
    SolveTrace plain = solve(spec, default_opts(), midpoint_start(spec));
    SolveTrace pert = solve_perturbed(spec, Perturbation::zero(spec.grid_ptr()), default_opts(),
                                      midpoint_start(spec));
    REQUIRE(plain.iterations.size() == pert.iterations.size());
    CHECK(plain.converged == pert.converged);
    for (std::size_t i = 0; i < plain.iterations.size(); ++i) {
        CHECK(plain.iterations[i].j == pert.iterations[i].j);
        CHECK(plain.iterations[i].gap == pert.iterations[i].gap);
        CHECK(plain.iterations[i].step == pert.iterations[i].step);
        CHECK(plain.iterations[i].bb_residual == pert.iterations[i].bb_residual);
    }
    for (std::size_t k = 0; k < plain.final_control.u.size(); ++k)
        CHECK(plain.final_control.u[k] == pert.final_control.u[k]);
}

TEST_CASE("perturbed solve satisfies its own first-order system at convergence") {
    ProblemSpec spec = make_cubic_benchmark(48);
    Prng rng(9);
    Perturbation e{GridFunction::sample(spec.grid_ptr(),
                                        [&](double, double) { return rng.uniform(-0.3, 0.3); }),
                   GridFunction::sample(spec.grid_ptr(),
                                        [&](double, double) { return rng.uniform(-0.3, 0.3); })};
    SolveTrace trace = solve_perturbed(spec, e, default_opts(), midpoint_start(spec));
    REQUIRE(trace.converged);
    CHECK(trace.iterations.back().gap <= 1e-8);
    // the bundle's adjoint is the perturbed adjoint at the final control
    EvaluatedControl check = eval_perturbed(spec, trace.final_control.u, e);
    CHECK(lp_norm(sub(check.adjoint, trace.final_control.adjoint), NormKind::linf) <= 1e-12);
}

TEST_CASE("perturbed solutions approach the unperturbed one as e shrinks") {
    // Amplitude and grid chosen so the top scales genuinely move the control.
    auto bench = make_lq_benchmark(512, 0.1);
    SolveTrace base = solve(bench.spec, default_opts(), midpoint_start(bench.spec));
    REQUIRE(base.converged);
    Prng rng(13);
    GridFunction dj = GridFunction::sample(bench.spec.grid_ptr(),
                                           [&](double, double) { return rng.uniform(-1.0, 1.0); });
    dj = scaled(dj, 1.0 / lp_norm(dj, NormKind::l2));

    double prev = 1e300;
    bool moved = false;
    for (double t : {0.2, 0.1, 0.05, 0.025}) {
        Perturbation e{scaled(dj, t), GridFunction::zeros(bench.spec.grid_ptr())};
        SolveTrace pert = solve_perturbed(bench.spec, e, default_opts(), base.final_control.u);
        REQUIRE(pert.converged);
        const double dist = lp_norm(sub(pert.final_control.u, base.final_control.u), NormKind::l1);
        CHECK(dist <= prev + 1e-15);
        moved = moved || dist > 0.0;
        prev = dist;
    }
    CHECK(moved);
    CHECK(prev == 0.0); // smallest scale no longer moves the two-level control
}
