#include "bangbang/objective.hpp"

namespace bangbang {

double cost_value(const ProblemSpec& spec, const GridFunction& y) {
    const Grid& g = spec.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k)
        s += g.weight(k) * spec.cost().value(k, y[k]);
    return s;
}

EvaluatedControl eval_J(const ProblemSpec& spec, const GridFunction& u) {
    StateSolveReport report = solve_state(spec, u);
    GridFunction y = report.y;
    GridFunction phi = solve_adjoint(spec, y);
    const double value = cost_value(spec, y);
    return {u, std::move(y), std::move(phi), value, std::move(report)};
}

double grad_pairing(const EvaluatedControl& ec, const GridFunction& v) {
    return inner_product(ec.adjoint, v);
}

double hessian_form_with_z(const ProblemSpec& spec, const EvaluatedControl& ec,
                           const GridFunction& z1, const GridFunction& z2) {
    const Grid& g = spec.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < z1.size(); ++k) {
        const double curvature =
            spec.cost().dyy(k, ec.state[k]) - ec.adjoint[k] * spec.f().dyy(ec.state[k]);
        s += g.weight(k) * curvature * z1[k] * z2[k];
    }
    return s;
}

double hessian_form(const ProblemSpec& spec, const EvaluatedControl& ec, const GridFunction& v1,
                    const GridFunction& v2) {
    GridFunction z1 = solve_linearized(spec, ec.state, v1);
    GridFunction z2 = solve_linearized(spec, ec.state, v2);
    return hessian_form_with_z(spec, ec, z1, z2);
}

EvaluatedControl eval_perturbed(const ProblemSpec& spec, const GridFunction& u,
                                const Perturbation& e) {
    require_same_grid(u, e.e_J);
    GridFunction rhs = add(u, e.e_y);
    StateSolveReport report = solve_state(spec, rhs);
    GridFunction y = report.y;
    GridFunction phi = solve_perturbed_adjoint(spec, y, e.e_J);
    const double value = cost_value(spec, y) + inner_product(e.e_J, y);
    return {u, std::move(y), std::move(phi), value, std::move(report)};
}

double perturbed_hessian_form_with_z(const ProblemSpec& spec, const EvaluatedControl& ec_shifted,
                                     const GridFunction& e_J, const GridFunction& z1,
                                     const GridFunction& z2) {
    const double base = hessian_form_with_z(spec, ec_shifted, z1, z2);
    GridFunction w = solve_second_order(spec, ec_shifted.state, z1, z2);
    return base + inner_product(e_J, w);
}

double perturbed_hessian_form(const ProblemSpec& spec, const GridFunction& u,
                              const Perturbation& e, const GridFunction& v1,
                              const GridFunction& v2) {
    EvaluatedControl shifted = eval_J(spec, add(u, e.e_y));
    GridFunction z1 = solve_linearized(spec, shifted.state, v1);
    GridFunction z2 = solve_linearized(spec, shifted.state, v2);
    return perturbed_hessian_form_with_z(spec, shifted, e.e_J, z1, z2);
}

} // namespace bangbang
