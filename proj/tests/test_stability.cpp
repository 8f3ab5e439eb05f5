#include <doctest.h>

#include <cmath>

#include "bangbang/stability.hpp"
#include "bangbang/rng.hpp"
#include "support/benchmarks.hpp"

using namespace bangbang;
using bangbang::testing::make_lq_benchmark;

namespace {

SolveOptions default_opts() {
    SolveOptions o;
    o.max_iters = 2000;
    o.gap_tol = 1e-8;
    return o;
}

EvaluatedControl solve_to_optimum(const ProblemSpec& spec) {
    GridFunction u0 = convex_combo(spec.bounds().lower(), spec.bounds().upper(), 0.5);
    SolveTrace trace = solve(spec, default_opts(), u0);
    REQUIRE(trace.converged);
    return trace.final_control;
}

SweepResult synthetic_sweep(const std::vector<double>& scales,
                            const std::vector<double>& distances) {
    SweepResult r;
    for (std::size_t i = 0; i < scales.size(); ++i)
        r.records.push_back({scales[i], scales[i], distances[i], distances[i], 0.0, 1, true});
    return r;
}

} // namespace

TEST_CASE("geometric ladder") {
    auto t = geometric_ladder(0.1, 0.5, 4);
    REQUIRE(t.size() == 4);
    CHECK(t[0] == 0.1);
    CHECK(t[3] == doctest::Approx(0.0125).epsilon(1e-15));
}

TEST_CASE("smooth random directions are unit-norm and component-selective") {
    auto g = Grid::make_1d(0.0, 1.0, 64);
    for (int kind : {0, 1, 2}) {
        Perturbation d = smooth_random_direction(g, kind, 7);
        CHECK(norm_E(d) == doctest::Approx(1.0).epsilon(1e-12));
        if (kind == 0) CHECK(lp_norm(d.e_y, NormKind::linf) == 0.0);
        if (kind == 1) CHECK(lp_norm(d.e_J, NormKind::linf) == 0.0);
        if (kind == 2) {
            CHECK(lp_norm(d.e_J, NormKind::linf) > 0.0);
            CHECK(lp_norm(d.e_y, NormKind::linf) > 0.0);
        }
    }
    // seeded: reproducible
    Perturbation a = smooth_random_direction(g, 2, 9);
    Perturbation b = smooth_random_direction(g, 2, 9);
    for (std::size_t k = 0; k < a.e_J.size(); ++k) CHECK(a.e_J[k] == b.e_J[k]);
}

TEST_CASE("sweep with the zero direction never moves the control") {
    auto bench = make_lq_benchmark(64);
    EvaluatedControl ec = solve_to_optimum(bench.spec);
    SweepPlan plan = make_sweep_plan(Perturbation::zero(bench.spec.grid_ptr()),
                                     geometric_ladder(0.1, 0.5, 5), default_opts());
    plan.include_zero_reference = true;
    SweepResult res = run_sweep(bench.spec, ec, plan);
    REQUIRE(res.records.size() == 6);
    for (const auto& r : res.records) {
        CHECK(r.converged);
        CHECK(r.dist_l1 == 0.0);
        CHECK(r.dist_l2 == 0.0);
        CHECK(r.iters == 0);
    }
    CHECK(res.records.back().t == 0.0);
    CHECK(fit_holder(res, 1.0).verdict == HolderVerdict::superstable);
}

TEST_CASE("jointly rescaling direction and ladder leaves records unchanged") {
    auto bench = make_lq_benchmark(256, 0.1);
    EvaluatedControl ec = solve_to_optimum(bench.spec);
    Perturbation d = smooth_random_direction(bench.spec.grid_ptr(), 0, 3);

    SweepPlan plain{d, {0.4, 0.2, 0.1}, false, default_opts(), 0, 1};
    SweepPlan doubled{{scaled(d.e_J, 2.0), scaled(d.e_y, 2.0)},
                      {0.2, 0.1, 0.05},
                      false,
                      default_opts(),
                      0,
                      1};
    SweepResult a = run_sweep(bench.spec, ec, plain);
    SweepResult b = run_sweep(bench.spec, ec, doubled);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].norm_e == b.records[i].norm_e);
        CHECK(a.records[i].dist_l1 == b.records[i].dist_l1);
        CHECK(a.records[i].dist_l2 == b.records[i].dist_l2);
        CHECK(a.records[i].iters == b.records[i].iters);
    }
}

TEST_CASE("sweep distances do not grow as the scale shrinks") {
    auto bench = make_lq_benchmark(512, 0.1);
    EvaluatedControl ec = solve_to_optimum(bench.spec);
    SweepPlan plan = make_sweep_plan(smooth_random_direction(bench.spec.grid_ptr(), 0, 5),
                                     geometric_ladder(0.4, 0.5, 6), default_opts());
    SweepResult res = run_sweep(bench.spec, ec, plan);
    double prev = 1e300;
    bool moved = false;
    for (const auto& r : res.records) {
        REQUIRE(r.converged);
        CHECK(r.dist_l1 <= prev + 1e-15);
        moved = moved || r.dist_l1 > 0.0;
        prev = r.dist_l1;
    }
    CHECK(moved);
}

TEST_CASE("holder fit recovers exact synthetic power laws") {
    std::vector<double> t = geometric_ladder(0.1, 0.5, 8);
    std::vector<double> d(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) d[i] = 3.0 * t[i];
    HolderFit lin = fit_holder(synthetic_sweep(t, d), 1.0);
    CHECK(lin.slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lin.prefactor == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(lin.r2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lin.verdict == HolderVerdict::consistent);

    // faster-than-expected decay is consistent: the estimate is an upper bound
    for (std::size_t i = 0; i < t.size(); ++i) d[i] = 0.7 * t[i] * t[i];
    HolderFit quad = fit_holder(synthetic_sweep(t, d), 1.0);
    CHECK(quad.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(quad.verdict == HolderVerdict::consistent);

    // slower decay refutes it
    for (std::size_t i = 0; i < t.size(); ++i) d[i] = std::pow(t[i], 0.5);
    CHECK(fit_holder(synthetic_sweep(t, d), 1.0).verdict == HolderVerdict::inconsistent);
}

TEST_CASE("holder fit error and superstable paths") {
    std::vector<double> t2 = {0.1, 0.05};
    CHECK_THROWS_AS(fit_holder(synthetic_sweep(t2, {0.3, 0.15}), 1.0), InsufficientDataError);

    std::vector<double> t8 = geometric_ladder(0.1, 0.5, 8);
    CHECK(fit_holder(synthetic_sweep(t8, std::vector<double>(8, 0.0)), 1.0).verdict ==
          HolderVerdict::superstable);
}

TEST_CASE("adjoint perturbation constant probe") {
    auto bench = make_lq_benchmark(64);
    const double c = probe_adjoint_constant(bench.spec, bench.u_star, 20, 77);
    CHECK(c > 0.0);
    // the probed constant bounds an independent draw up to sampling slack
    Prng rng(78);
    GridFunction ej = GridFunction::sample(bench.spec.grid_ptr(),
                                           [&](double, double) { return rng.uniform(-1.0, 1.0); });
    Perturbation e{ej, GridFunction::zeros(bench.spec.grid_ptr())};
    EvaluatedControl base = eval_J(bench.spec, bench.u_star);
    EvaluatedControl pert = eval_perturbed(bench.spec, bench.u_star, e);
    const double response = lp_norm(sub(pert.adjoint, base.adjoint), NormKind::linf);
    CHECK(response <= 2.0 * c * norm_E(e));
}

TEST_CASE("kkt distance check at the reference point and out of the neighborhood") {
    auto bench = make_lq_benchmark(64);
    EvaluatedControl ec = solve_to_optimum(bench.spec);
    KktDistanceCheck at_zero = kkt_distance_check(
        bench.spec, ec, ec.u, Perturbation::zero(bench.spec.grid_ptr()), 0.2, 1.0, 1.0, 0.1, 5);
    CHECK(at_zero.lhs == 0.0);
    CHECK(at_zero.rhs == 0.0);
    CHECK(at_zero.holds);
    CHECK(at_zero.rho == doctest::Approx(2.0 * at_zero.c / 0.2));

    GridFunction far = bench.spec.bounds().upper();
    CHECK_THROWS_AS(kkt_distance_check(bench.spec, ec, far,
                                       Perturbation::zero(bench.spec.grid_ptr()), 0.2, 1.0, 1.0,
                                       1e-6, 5),
                    OutOfNeighborhoodError);
}

TEST_CASE("kkt distance inequality holds at a genuinely moved perturbed solution") {
    auto bench = make_lq_benchmark(512, 0.1);
    EvaluatedControl ec = solve_to_optimum(bench.spec);
    MeasureFit fit = fit_measure_condition(ec.adjoint, 10.0 * bench.spec.grid().max_spacing(),
                                           0.8 * lp_norm(ec.adjoint, NormKind::linf), 20);
    const double kappa = compute_kappa(bench.spec.bounds(), fit);
    ConeParams cone{default_cone_tau(fit, bench.spec.grid().measure()), 1e-6};
    SscReport ssc = estimate_ssc_delta(bench.spec, ec, cone, 16, 83);
    REQUIRE(ssc.satisfied());

    Perturbation d = smooth_random_direction(bench.spec.grid_ptr(), 0, 5);
    const double t = 0.2;
    Perturbation e{scaled(d.e_J, t), scaled(d.e_y, t)};
    SolveTrace pert = solve_perturbed(bench.spec, e, default_opts(), ec.u);
    REQUIRE(pert.converged);
    REQUIRE(lp_norm(sub(pert.final_control.u, ec.u), NormKind::l1) > 0.0);

    KktDistanceCheck check = kkt_distance_check(bench.spec, ec, pert.final_control.u, e, kappa,
                                                fit.exponent, ssc.delta_min, 1.0, 5);
    CHECK(check.holds);
    CHECK(check.rho > 0.0);
}

TEST_CASE("warm and cold starts land on the same perturbed solution") {
    auto bench = make_lq_benchmark(512, 0.1);
    const double h = bench.spec.grid().spacing(0);
    EvaluatedControl ec = solve_to_optimum(bench.spec);
    Perturbation d = smooth_random_direction(bench.spec.grid_ptr(), 0, 5);
    for (double t : {0.4, 0.1}) {
        Perturbation e{scaled(d.e_J, t), scaled(d.e_y, t)};
        SolveTrace warm = solve_perturbed(bench.spec, e, default_opts(), ec.u);
        SolveTrace cold = solve_perturbed(
            bench.spec, e, default_opts(),
            convex_combo(bench.spec.bounds().lower(), bench.spec.bounds().upper(), 0.5));
        REQUIRE(warm.converged);
        REQUIRE(cold.converged);
        CHECK(lp_norm(sub(warm.final_control.u, cold.final_control.u), NormKind::l1) <=
              2.0 * h);
    }
}

TEST_CASE("a sweep whose every scale fails to converge is an error") {
    // Zero iteration budget from a non-solution start: every perturbed solve
    // reports converged = false, so the sweep as a whole fails.
    auto bench = make_lq_benchmark(64);
    GridFunction off_solution =
        convex_combo(bench.spec.bounds().lower(), bench.spec.bounds().upper(), 0.25);
    EvaluatedControl ec_off = eval_J(bench.spec, off_solution);
    SolveOptions opts = default_opts();
    opts.max_iters = 0;
    SweepPlan plan = make_sweep_plan(smooth_random_direction(bench.spec.grid_ptr(), 2, 11),
                                     geometric_ladder(0.1, 0.5, 3), opts);
    plan.options = opts;
    CHECK_THROWS_AS(run_sweep(bench.spec, ec_off, plan), SweepFailureError);
}
