#include "bangbang/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "bangbang/expression.hpp"
#include "bangbang/io.hpp"
#include "bangbang/stability.hpp"

namespace bangbang {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Adjoints at or below this sup-norm are treated as identically zero: the
// tracking is exact and every optimality check is vacuous.
constexpr double kZeroAdjoint = 1e-14;

ordered_json json_number(double v) {
    if (std::isinf(v) || std::isnan(v)) return nullptr;
    return v;
}

void write_json(const fs::path& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

GridFunction default_start(const ProblemSpec& spec) {
    return convex_combo(spec.bounds().lower(), spec.bounds().upper(), 0.5);
}

struct StoredSolution {
    ProblemSpec spec;
    GridFunction u;
};

/// Load the control written by cmd_solve and validate that the companion
/// artifacts exist.
StoredSolution load_solution(const RunConfig& config, const fs::path& out_dir) {
    ProblemSpec spec = build_problem(config.problem);
    for (const char* name : {"solution.csv", "state.csv", "adjoint.csv", "trace.csv"}) {
        if (!fs::exists(out_dir / name))
            throw Error("missing solve artifact " + (out_dir / name).string() +
                        "; run the solve command first");
    }
    GridFunction u = read_grid_function_csv(out_dir / "solution.csv", spec.grid_ptr());
    return {std::move(spec), std::move(u)};
}

} // namespace

int cmd_solve(const RunConfig& config, const fs::path& out_dir, int threads) {
    (void)threads; // the solve loop is sequential by contract
    try {
        ProblemSpec spec = build_problem(config.problem);
        SolveOptions opts = build_solve_options(config.solver);
        SolveTrace trace = solve(spec, opts, default_start(spec));

        fs::create_directories(out_dir);
        write_grid_function_csv(out_dir / "solution.csv", trace.final_control.u);
        write_grid_function_csv(out_dir / "state.csv", trace.final_control.state);
        write_grid_function_csv(out_dir / "adjoint.csv", trace.final_control.adjoint);
        write_trace_csv(out_dir / "trace.csv", trace);

        if (!trace.converged) {
            std::cerr << "solve: gap " << format_double(trace.iterations.back().gap)
                      << " above tolerance after " << trace.iterations.back().iter
                      << " iterations\n";
            return ExitCode::not_converged;
        }
        return ExitCode::ok;
    } catch (const Error& e) {
        std::cerr << "solve: " << e.what() << '\n';
        return ExitCode::error;
    }
}

int cmd_analyze(const RunConfig& config, const fs::path& out_dir, int threads) {
    try {
        StoredSolution stored = load_solution(config, out_dir);
        const ProblemSpec& spec = stored.spec;
        const AnalysisConfig& ac = config.analysis;
        const std::uint64_t seed = analysis_seed(config);

        EvaluatedControl ec = eval_J(spec, stored.u);

        ordered_json report;
        bool all_ok = true;
        auto check = [&](bool ok, const std::string& what) {
            if (!ok) {
                std::cout << "analyze: check failed: " << what << '\n';
                all_ok = false;
            }
        };

        const double phi_max = lp_norm(ec.adjoint, NormKind::linf);
        if (phi_max <= kZeroAdjoint) {
            // Exact tracking: the adjoint vanishes, the control never moves
            // under small perturbations, and there is nothing to fit.
            std::cout << "analyze: adjoint is identically zero (superstable instance)\n";
            LinearizedConstants lc =
                estimate_linearized_constants(spec, ec.u, ac.constant_samples, seed, threads);
            report["K"] = nullptr;
            report["ae"] = nullptr;
            report["kappa"] = nullptr;
            report["tau"] = nullptr;
            report["delta_min"] = nullptr;
            report["C1"] = json_number(lc.c1);
            report["C3"] = json_number(lc.c3);
            report["growth_pass_rate"] = nullptr;
            report["quadratic_growth_pass_rate"] = nullptr;
            MeasureFit empty;
            write_measure_fit_csv(out_dir / "measure_fit.csv", empty);
            write_json(out_dir / "analysis.json", report);
            return ExitCode::ok;
        }

        check(vi_gap(ec, spec.bounds()) <= config.solver.gap_tol,
              "first-order gap above the solver tolerance");

        const double eps_min = ac.eps_min.value_or(10.0 * spec.grid().max_spacing());
        const double eps_max = ac.eps_max.value_or(0.8 * phi_max);
        MeasureFit fit = [&] {
            try {
                return fit_measure_condition(ec.adjoint, eps_min, eps_max, ac.eps_points);
            } catch (const DegenerateFitError&) {
                std::cout << "analyze: adjoint is bounded away from zero; "
                             "reporting the degenerate sentinel\n";
                return MeasureFit::degenerate_sentinel(eps_min, eps_max);
            }
        }();
        write_measure_fit_csv(out_dir / "measure_fit.csv", fit);

        const double kappa = compute_kappa(spec.bounds(), fit);
        const double tau = ac.tau.value_or(default_cone_tau(fit, spec.grid().measure()));
        ConeParams cone{tau, 1e-6};

        SscReport ssc = estimate_ssc_delta(spec, ec, cone, ac.cone_samples, seed, threads);
        ssc.kappa = kappa;

        double growth_rate = std::numeric_limits<double>::quiet_NaN();
        double quad_rate = std::numeric_limits<double>::quiet_NaN();
        if (!fit.degenerate()) {
            check(fit.envelope_ok, "level-set measures escape the fitted power-law envelope");

            GrowthCheckResult growth = verify_first_order_growth(
                spec, ec, kappa, fit.exponent, ac.growth_samples, seed, threads);
            growth_rate = growth.pass_rate;
            ssc.growth_pass_rate = growth.pass_rate;
            check(growth.pass_rate >= 0.99, "first-order growth pass rate below 0.99");

            if (ssc.satisfied() && !std::isinf(ssc.delta_min)) {
                QuadraticGrowthResult quad = check_quadratic_growth(
                    spec, ec, kappa, fit.exponent, ssc.delta_min, ac.quadratic_samples,
                    ac.quadratic_radius, seed, threads);
                quad_rate = quad.pass_rate;
                ssc.quadratic_growth_pass_rate = quad.pass_rate;
                check(quad.pass_rate >= 1.0, "quadratic growth pass rate below 1.0");
            }
        }
        check(ssc.satisfied(), "sampled second-order coercivity constant is not positive");

        LinearizedConstants lc =
            estimate_linearized_constants(spec, ec.u, ac.constant_samples, seed, threads);

        report["K"] = fit.degenerate() ? ordered_json(nullptr) : json_number(fit.prefactor);
        report["ae"] = json_number(fit.exponent);
        report["kappa"] = json_number(kappa);
        report["tau"] = json_number(tau);
        report["delta_min"] = json_number(ssc.delta_min);
        report["C1"] = json_number(lc.c1);
        report["C3"] = json_number(lc.c3);
        report["growth_pass_rate"] = json_number(growth_rate);
        report["quadratic_growth_pass_rate"] = json_number(quad_rate);
        write_json(out_dir / "analysis.json", report);

        return all_ok ? ExitCode::ok : ExitCode::check_failed;
    } catch (const Error& e) {
        std::cerr << "analyze: " << e.what() << '\n';
        return ExitCode::error;
    }
}

int cmd_perturb(const RunConfig& config, const fs::path& out_dir, int threads) {
    try {
        StoredSolution stored = load_solution(config, out_dir);
        const ProblemSpec& spec = stored.spec;
        const SweepConfig& sc = config.sweep;
        const std::uint64_t seed = sweep_seed(config);

        EvaluatedControl ec = eval_J(spec, stored.u);
        if (vi_gap(ec, spec.bounds()) > config.solver.gap_tol)
            throw Error("stored solution does not satisfy the first-order system; "
                        "re-run the solve command");

        // Expected stability exponent from the measure fit at this solution.
        const double phi_max = lp_norm(ec.adjoint, NormKind::linf);
        double expected = std::numeric_limits<double>::infinity();
        if (phi_max > kZeroAdjoint) {
            const double eps_min =
                config.analysis.eps_min.value_or(10.0 * spec.grid().max_spacing());
            const double eps_max = config.analysis.eps_max.value_or(0.8 * phi_max);
            try {
                expected = fit_measure_condition(ec.adjoint, eps_min, eps_max,
                                                 config.analysis.eps_points)
                               .exponent;
            } catch (const DegenerateFitError&) {
                // keep the +inf sentinel: superstability is the prediction
            }
        }

        std::vector<Perturbation> directions;
        if (sc.directions == "all") {
            for (int kind = 0; kind < 3; ++kind)
                directions.push_back(smooth_random_direction(spec.grid_ptr(), kind, seed));
        } else {
            Expression dj = Expression::parse(sc.d_grad);
            Expression dy = Expression::parse(sc.d_state);
            if (spec.grid().dim() == 1 && (dj.uses_y() || dy.uses_y()))
                throw ConfigError("sweep direction uses coordinate y on a 1-d domain");
            Perturbation d{GridFunction::sample(spec.grid_ptr(),
                                                [&](double x, double y) { return dj.eval(x, y); }),
                           GridFunction::sample(spec.grid_ptr(),
                                                [&](double x, double y) { return dy.eval(x, y); })};
            const double n = norm_E(d);
            if (n > 0.0) d = {scaled(d.e_J, 1.0 / n), scaled(d.e_y, 1.0 / n)};
            directions.push_back(std::move(d));
        }

        ordered_json fits = ordered_json::array();
        bool all_ok = true;
        for (std::size_t k = 0; k < directions.size(); ++k) {
            SweepPlan plan{directions[k],
                           geometric_ladder(sc.t0, sc.ratio, sc.rungs),
                           /*include_zero_reference=*/false,
                           build_solve_options(config.solver),
                           seed,
                           threads};
            SweepResult result = run_sweep(spec, ec, plan);
            write_sweep_csv(out_dir / ("sweep_" + std::to_string(k) + ".csv"), result);

            HolderFit fit = [&] {
                try {
                    return fit_holder(result, expected);
                } catch (const InsufficientDataError& e) {
                    std::cout << "perturb: direction " << k << ": " << e.what() << '\n';
                    HolderFit bad;
                    bad.verdict = HolderVerdict::inconsistent;
                    return bad;
                }
            }();

            ordered_json entry;
            entry["slope"] = json_number(fit.slope);
            entry["prefactor"] = json_number(fit.prefactor);
            entry["r2"] = json_number(fit.r2);
            entry["verdict"] = to_string(fit.verdict);
            fits.push_back(entry);
            if (fit.verdict == HolderVerdict::inconsistent) all_ok = false;
            if (fit.verdict == HolderVerdict::superstable)
                std::cout << "perturb: direction " << k
                          << ": perturbations never moved the control (superstable)\n";
        }
        write_json(out_dir / "holder_fit.json", fits);

        return all_ok ? ExitCode::ok : ExitCode::check_failed;
    } catch (const Error& e) {
        std::cerr << "perturb: " << e.what() << '\n';
        return ExitCode::error;
    }
}

} // namespace bangbang
