#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bangbang/grid.hpp"
#include "bangbang/model.hpp"

namespace bangbang {

/// Finite-difference discretization of -div(a grad .) on interior nodes with
/// Dirichlet rows eliminated: 3-point stencil in 1D, 5-point in 2D, face
/// coefficients from nodal averages of a. Assembly is symmetric by
/// construction and the matrix is an M-matrix, so adding any nonnegative
/// diagonal keeps it SPD.
class EllipticOperator {
public:
    static EllipticOperator assemble(const Grid& grid, const GridFunction& diffusion);

    std::size_t size() const { return diag_.size(); }

    /// y = M x over interior unknowns.
    void apply(std::span<const double> x, std::span<double> y) const;

    std::span<const double> diagonal() const { return diag_; }

    /// Visit every stored entry (row, col, value); used by symmetry checks.
    void for_each_entry(const std::function<void(std::size_t, std::size_t, double)>& fn) const;

private:
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_;
    std::vector<double> val_;
    std::vector<double> diag_;
};

struct StateSolveReport {
    GridFunction y;
    int newton_iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Newton non-convergence; carries the report of the failed solve.
struct SolverFailureError : Error {
    SolverFailureError(const std::string& what, StateSolveReport rep)
        : Error(what), report(std::move(rep)) {}
    StateSolveReport report;
};

/// Pinned solver tolerances. Exposed so tests can exercise failure paths;
/// production paths use the defaults.
struct SolverParams {
    double newton_tol = 1e-10; // absolute, on the quadrature-weighted residual
    int max_newton = 50;
    int max_damping = 30;
    double cg_rel_tol = 1e-12;
};

/// Solve A y + f(y) = rhs with zero Dirichlet data by damped Newton from
/// y = 0. Throws SolverFailureError if the iteration stalls or the budget is
/// exhausted.
StateSolveReport solve_state(const ProblemSpec& spec, const GridFunction& rhs,
                             const SolverParams& params = {});

/// Solve (A + df/dy(y)) z = v; the directional derivative of the
/// control-to-state map at the state y.
GridFunction solve_linearized(const ProblemSpec& spec, const GridFunction& y,
                              const GridFunction& v, const SolverParams& params = {});

/// Solve (A + df/dy(y)) w = -d2f/dy2(y) z1 z2; the second derivative of the
/// control-to-state map paired with two linearized solutions.
GridFunction solve_second_order(const ProblemSpec& spec, const GridFunction& y,
                                const GridFunction& z1, const GridFunction& z2,
                                const SolverParams& params = {});

/// Solve (A + df/dy(y)) phi = dL/dy(., y). The operator is symmetric, so the
/// adjoint reuses the same assembled matrix as the linearized solve.
GridFunction solve_adjoint(const ProblemSpec& spec, const GridFunction& y,
                           const SolverParams& params = {});

/// Adjoint with the disturbance e_J added to the right-hand side.
GridFunction solve_perturbed_adjoint(const ProblemSpec& spec, const GridFunction& y,
                                     const GridFunction& e_J, const SolverParams& params = {});

} // namespace bangbang
