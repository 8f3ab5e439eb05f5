#pragma once

#include "bangbang/pde.hpp"

namespace bangbang {

/// One control together with everything its evaluation produced: state,
/// adjoint, cost value, and the state-solve report. Immutable; the analysis
/// code pairs the cached adjoint against many directions.
struct EvaluatedControl {
    GridFunction u;
    GridFunction state;
    GridFunction adjoint;
    double value = 0.0;
    StateSolveReport report;
};

/// Evaluate the reduced cost J(u): solve the state, quadrature the integrand,
/// solve the adjoint, and bundle the results.
EvaluatedControl eval_J(const ProblemSpec& spec, const GridFunction& u);

/// Quadrature of the cost integrand at a given state.
double cost_value(const ProblemSpec& spec, const GridFunction& y);

/// J'(u)v through the adjoint representation: the L2 pairing of the cached
/// adjoint with v.
double grad_pairing(const EvaluatedControl& ec, const GridFunction& v);

/// J''(u)(v1, v2): linearized solves for both directions, then the weighted
/// quadrature of (d2L/dy2 - adjoint * d2f/dy2) z1 z2. Symmetric bilinear.
double hessian_form(const ProblemSpec& spec, const EvaluatedControl& ec, const GridFunction& v1,
                    const GridFunction& v2);

/// Same form with both linearized solutions already in hand.
double hessian_form_with_z(const ProblemSpec& spec, const EvaluatedControl& ec,
                           const GridFunction& z1, const GridFunction& z2);

/// Evaluate the perturbed cost at (u, e): state solved with right side
/// u + e_y, value J(u + e_y) + (e_J, y)_{L2}, adjoint replaced by the
/// perturbed adjoint. grad_pairing on the returned bundle gives the partial
/// u-derivative of the perturbed cost.
EvaluatedControl eval_perturbed(const ProblemSpec& spec, const GridFunction& u,
                                const Perturbation& e);

/// Second u-derivative of the perturbed cost:
/// J''(u + e_y)(v1, v2) + (e_J, G''(u + e_y)(v1, v2))_{L2}.
double perturbed_hessian_form(const ProblemSpec& spec, const GridFunction& u,
                              const Perturbation& e, const GridFunction& v1,
                              const GridFunction& v2);

/// Same, reusing an unperturbed evaluation at u + e_y (ec_shifted) and the
/// linearized solutions at its state.
double perturbed_hessian_form_with_z(const ProblemSpec& spec, const EvaluatedControl& ec_shifted,
                                     const GridFunction& e_J, const GridFunction& z1,
                                     const GridFunction& z2);

} // namespace bangbang
