#include "bangbang/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bangbang/parallel.hpp"
#include "bangbang/rng.hpp"

namespace bangbang {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

MeasureFit MeasureFit::degenerate_sentinel(double eps_lo, double eps_hi) {
    MeasureFit fit;
    fit.exponent = std::numeric_limits<double>::infinity();
    fit.prefactor = 0.0;
    fit.r2 = 1.0;
    fit.eps_lo = eps_lo;
    fit.eps_hi = eps_hi;
    fit.envelope_ok = true;
    return fit;
}

MeasureFit fit_measure_condition(const GridFunction& phi, double eps_min, double eps_max,
                                 int n_points) {
    if (!(eps_min > 0.0) || !(eps_min < eps_max) || n_points < 2)
        throw InsufficientDataError("measure fit needs 0 < eps_min < eps_max and >= 2 points");

    MeasureFit fit;
    fit.eps_lo = eps_min;
    fit.eps_hi = eps_max;
    const double log_lo = std::log(eps_min);
    const double log_hi = std::log(eps_max);
    for (int i = 0; i < n_points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n_points - 1);
        const double eps = std::exp(log_lo + f * (log_hi - log_lo));
        fit.epsilons.push_back(eps);
        fit.measures.push_back(level_set_measure(phi, eps));
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i) {
        if (fit.measures[i] > 0.0) {
            lx.push_back(std::log(fit.epsilons[i]));
            ly.push_back(std::log(fit.measures[i]));
        }
    }
    if (lx.empty())
        throw DegenerateFitError("all level-set measures vanish; field is bounded away from zero");
    if (lx.size() < 4)
        throw InsufficientDataError("measure fit has only " + std::to_string(lx.size()) +
                                    " usable points, need 4");

    const LineFit line = fit_line(lx, ly);
    fit.exponent = line.slope;
    fit.prefactor = std::exp(line.intercept);
    fit.r2 = line.r2;

    fit.envelope_ok = true;
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i) {
        if (fit.measures[i] <= 0.0) continue;
        const double bound = fit.prefactor * std::pow(fit.epsilons[i], fit.exponent) * 1.25;
        if (fit.measures[i] > bound) fit.envelope_ok = false;
    }
    return fit;
}

double compute_kappa(const Bounds& b, const MeasureFit& fit) {
    if (fit.degenerate()) return 0.5;
    const double base = 2.0 * b.max_gap() * fit.prefactor;
    return 0.5 * std::pow(base, -1.0 / fit.exponent);
}

double default_cone_tau(const MeasureFit& fit, double box_measure) {
    if (fit.degenerate()) return 0.0;
    return std::pow(0.05 * box_measure / fit.prefactor, 1.0 / fit.exponent);
}

namespace {

/// Admissible sample: even indices draw nodewise uniform in the box, odd
/// indices draw a random two-level control.
GridFunction draw_admissible(const Bounds& b, Prng& rng, std::uint64_t index) {
    const GridFunction& lo = b.lower();
    const GridFunction& hi = b.upper();
    std::vector<double> v(lo.size());
    if (index % 2 == 0) {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.uniform(lo[k], hi[k]);
    } else {
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.uniform() < 0.5 ? lo[k] : hi[k];
    }
    return GridFunction(lo.grid_ptr(), std::move(v));
}

enum class NodeRole : std::uint8_t { outside, at_lower, at_upper, pinned, free_sign };

std::vector<NodeRole> classify_nodes(const EvaluatedControl& ec, const Bounds& b,
                                     const ConeParams& cone) {
    std::vector<NodeRole> roles(ec.u.size());
    for (std::size_t k = 0; k < roles.size(); ++k) {
        if (std::abs(ec.adjoint[k]) > cone.tau) {
            roles[k] = NodeRole::outside;
            continue;
        }
        const double gap = b.upper()[k] - b.lower()[k];
        const double tol = cone.tol_bb * gap;
        const bool at_lo = ec.u[k] - b.lower()[k] <= tol;
        const bool at_hi = b.upper()[k] - ec.u[k] <= tol;
        if (at_lo && at_hi)
            roles[k] = NodeRole::pinned;
        else if (at_lo)
            roles[k] = NodeRole::at_lower;
        else if (at_hi)
            roles[k] = NodeRole::at_upper;
        else
            roles[k] = NodeRole::free_sign;
    }
    return roles;
}

} // namespace

std::vector<GridFunction> sample_critical_cone(const EvaluatedControl& ec, const Bounds& b,
                                               const ConeParams& cone, int n_samples,
                                               std::uint64_t seed) {
    const auto roles = classify_nodes(ec, b, cone);
    const bool any_nonzero_slot = std::any_of(roles.begin(), roles.end(), [](NodeRole r) {
        return r == NodeRole::at_lower || r == NodeRole::at_upper || r == NodeRole::free_sign;
    });
    std::vector<GridFunction> out;
    if (!any_nonzero_slot) return out; // cone is {0}

    out.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        Prng rng = sample_rng(seed, "analysis/cone", static_cast<std::uint64_t>(i));
        std::vector<double> v(roles.size(), 0.0);
        double norm2 = 0.0;
        for (std::size_t k = 0; k < roles.size(); ++k) {
            switch (roles[k]) {
            case NodeRole::at_lower: v[k] = rng.uniform(); break;
            case NodeRole::at_upper: v[k] = -rng.uniform(); break;
            case NodeRole::free_sign: v[k] = rng.uniform(-1.0, 1.0); break;
            case NodeRole::outside:
            case NodeRole::pinned: v[k] = 0.0; break;
            }
            norm2 += ec.u.grid().weight(k) * v[k] * v[k];
        }
        if (norm2 == 0.0) continue; // astronomically unlikely all-zero draw
        const double scale = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= scale;
        out.emplace_back(ec.u.grid_ptr(), std::move(v));
    }
    return out;
}

bool in_critical_cone(const EvaluatedControl& ec, const Bounds& b, const ConeParams& cone,
                      const GridFunction& v) {
    const auto roles = classify_nodes(ec, b, cone);
    for (std::size_t k = 0; k < roles.size(); ++k) {
        switch (roles[k]) {
        case NodeRole::outside:
            if (v[k] != 0.0) return false;
            break;
        case NodeRole::at_lower:
            if (v[k] < 0.0) return false;
            break;
        case NodeRole::at_upper:
            if (v[k] > 0.0) return false;
            break;
        case NodeRole::pinned:
            if (v[k] != 0.0) return false;
            break;
        case NodeRole::free_sign: break;
        }
    }
    return true;
}

SscReport estimate_ssc_delta(const ProblemSpec& spec, const EvaluatedControl& ec,
                             const ConeParams& cone, int n_samples, std::uint64_t seed,
                             int threads) {
    SscReport report;
    const auto directions = sample_critical_cone(ec, spec.bounds(), cone, n_samples, seed);
    report.n_samples = static_cast<int>(directions.size());
    if (directions.empty()) {
        report.delta_min = std::numeric_limits<double>::infinity();
        return report;
    }

    std::vector<double> ratios(directions.size());
    parallel_for(directions.size(), threads, [&](std::size_t i) {
        GridFunction z = solve_linearized(spec, ec.state, directions[i]);
        const double num = hessian_form_with_z(spec, ec, z, z);
        const double den = inner_product(z, z);
        ratios[i] = num / den;
    });

    std::size_t argmin = 0;
    for (std::size_t i = 1; i < ratios.size(); ++i)
        if (ratios[i] < ratios[argmin]) argmin = i;
    report.delta_min = ratios[argmin];
    report.argmin_direction = directions[argmin];
    return report;
}

QuadraticGrowthResult check_quadratic_growth(const ProblemSpec& spec, const EvaluatedControl& ec,
                                             double kappa, double exponent, double delta,
                                             int n_samples, double radius, std::uint64_t seed,
                                             int threads) {
    const double power = std::isinf(exponent) ? 1.0 : 1.0 + 1.0 / exponent;
    const double slack = 1e-10 * (1.0 + std::abs(ec.value));
    const std::size_t n = static_cast<std::size_t>(n_samples);

    std::vector<std::uint8_t> passed(n, 0);
    std::vector<double> violations(n, -std::numeric_limits<double>::infinity());
    parallel_for(n, threads, [&](std::size_t i) {
        Prng rng = sample_rng(seed, "analysis/quadratic", i);
        GridFunction u = draw_admissible(spec.bounds(), rng, i);
        const double dist2 = lp_norm(sub(u, ec.u), NormKind::l2);
        if (dist2 > radius) u = convex_combo(ec.u, u, radius / dist2);
        GridFunction d = sub(u, ec.u);
        const double d1 = lp_norm(d, NormKind::l1);
        if (d1 == 0.0) {
            passed[i] = 1;
            violations[i] = 0.0;
            return;
        }
        GridFunction z = solve_linearized(spec, ec.state, d);
        const double z2 = inner_product(z, z);
        const double lhs = ec.value + 0.5 * kappa * std::pow(d1, power) + delta / 8.0 * z2;
        const double j_u = cost_value(spec, solve_state(spec, u).y);
        passed[i] = lhs <= j_u + slack ? 1 : 0;
        violations[i] = lhs - j_u;
    });

    QuadraticGrowthResult out;
    out.samples = n_samples;
    int pass = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        pass += passed[i];
        worst = std::max(worst, violations[i]);
    }
    out.pass_rate = n == 0 ? 1.0 : static_cast<double>(pass) / static_cast<double>(n);
    out.worst_violation = worst;
    return out;
}

GrowthCheckResult verify_first_order_growth(const ProblemSpec& spec, const EvaluatedControl& ec,
                                            double kappa, double exponent, int n_samples,
                                            std::uint64_t seed, int threads) {
    const double power = std::isinf(exponent) ? 1.0 : 1.0 + 1.0 / exponent;
    const double slack = 1e-10 * (1.0 + std::abs(ec.value));
    const std::size_t n = static_cast<std::size_t>(n_samples);

    std::vector<std::uint8_t> passed(n, 0);
    std::vector<double> ratios(n, std::numeric_limits<double>::infinity());
    parallel_for(n, threads, [&](std::size_t i) {
        Prng rng = sample_rng(seed, "analysis/growth", i);
        GridFunction u = draw_admissible(spec.bounds(), rng, i);
        GridFunction d = sub(u, ec.u);
        const double d1 = lp_norm(d, NormKind::l1);
        if (d1 == 0.0) {
            passed[i] = 1;
            return;
        }
        const double pairing = inner_product(ec.adjoint, d);
        const double growth = std::pow(d1, power);
        passed[i] = pairing >= kappa * growth - slack ? 1 : 0;
        ratios[i] = pairing / growth;
    });

    GrowthCheckResult out;
    out.samples = n_samples;
    int pass = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        pass += passed[i];
        worst = std::min(worst, ratios[i]);
    }
    out.pass_rate = n == 0 ? 1.0 : static_cast<double>(pass) / static_cast<double>(n);
    out.worst_ratio = worst;
    return out;
}

LinearizedConstants estimate_linearized_constants(const ProblemSpec& spec,
                                                  const GridFunction& u_bar, int n_samples,
                                                  std::uint64_t seed, int threads) {
    const EvaluatedControl base = eval_J(spec, u_bar);
    auto y_norm = [](const GridFunction& f) {
        return h1_seminorm(f) + lp_norm(f, NormKind::linf);
    };
    const std::size_t n = static_cast<std::size_t>(n_samples);

    std::vector<double> c1_ratios(n, 0.0), c3_ratios(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        Prng rng = sample_rng(seed, "analysis/constants", i);
        GridFunction u = draw_admissible(spec.bounds(), rng, i);
        const double du = lp_norm(sub(u, u_bar), NormKind::l2);
        if (du > 0.0) { // identical draws are excluded: the ratio is 0/0
            EvaluatedControl ecu = eval_J(spec, u);
            const double num =
                y_norm(sub(ecu.state, base.state)) + y_norm(sub(ecu.adjoint, base.adjoint));
            c1_ratios[i] = num / du;
        }
        GridFunction v = GridFunction::sample(u_bar.grid_ptr(),
                                              [&](double, double) { return rng.uniform(-1.0, 1.0); });
        const double v1 = lp_norm(v, NormKind::l1);
        if (v1 > 0.0) {
            GridFunction z = solve_linearized(spec, base.state, v);
            c3_ratios[i] = lp_norm(z, NormKind::l2) / v1;
        }
    });

    LinearizedConstants out;
    for (std::size_t i = 0; i < n; ++i) {
        out.c1 = std::max(out.c1, c1_ratios[i]);
        out.c3 = std::max(out.c3, c3_ratios[i]);
    }
    return out;
}

double check_perturbed_ssc(const ProblemSpec& spec, const EvaluatedControl& ec,
                           const Perturbation& e, const ConeParams& cone, int n_samples,
                           std::uint64_t seed, int threads) {
    const auto directions = sample_critical_cone(ec, spec.bounds(), cone, n_samples, seed);
    if (directions.empty()) return std::numeric_limits<double>::infinity();

    const EvaluatedControl shifted = eval_J(spec, add(ec.u, e.e_y));
    std::vector<double> ratios(directions.size());
    parallel_for(directions.size(), threads, [&](std::size_t i) {
        GridFunction z = solve_linearized(spec, shifted.state, directions[i]);
        const double num = perturbed_hessian_form_with_z(spec, shifted, e.e_J, z, z);
        const double den = inner_product(z, z);
        ratios[i] = num / den;
    });

    double min_ratio = ratios[0];
    for (double r : ratios) min_ratio = std::min(min_ratio, r);
    return min_ratio;
}

} // namespace bangbang
