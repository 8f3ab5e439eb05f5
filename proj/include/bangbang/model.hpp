#pragma once

#include <memory>

#include "bangbang/grid.hpp"

namespace bangbang {

/// Closed catalog of state-equation nonlinearities with hand-coded
/// derivatives. Every family is monotone nondecreasing in y (df/dy >= 0 for
/// coeff >= 0) and vanishes at y = 0.
class Nonlinearity {
public:
    enum class Kind { zero, linear, cubic, saturating };

    static Nonlinearity zero() { return Nonlinearity(Kind::zero, 0.0); }
    static Nonlinearity linear(double c) { return Nonlinearity(Kind::linear, c); }
    static Nonlinearity cubic(double c) { return Nonlinearity(Kind::cubic, c); }
    /// c * (y + y^3 / 3); derivative c * (1 + y^2).
    static Nonlinearity saturating(double c) { return Nonlinearity(Kind::saturating, c); }

    Kind kind() const { return kind_; }
    double coeff() const { return coeff_; }

    double value(double y) const;
    double dy(double y) const;
    double dyy(double y) const;

    /// True when d2f/dy2 vanishes identically (zero and linear families).
    bool curvature_free() const { return kind_ == Kind::zero || kind_ == Kind::linear; }

private:
    Nonlinearity(Kind kind, double c);

    Kind kind_;
    double coeff_;
};

/// Cost integrand family. Second derivative in y is identically 1, so the
/// boundedness assumption on d2L/dy2 holds by construction.
class Integrand {
public:
    enum class Kind { tracking, tracking_plus_linear };

    /// L = (y - y_d)^2 / 2.
    static Integrand tracking(GridFunction target);
    /// L = (y - y_d)^2 / 2 + w * y.
    static Integrand tracking_plus_linear(GridFunction target, GridFunction linear_weight);

    Kind kind() const { return kind_; }
    const GridFunction& target() const { return target_; }
    const GridFunction& linear_weight() const { return *linear_weight_; }

    double value(std::size_t node, double y) const;
    double dy(std::size_t node, double y) const;
    double dyy(std::size_t node, double y) const;

private:
    Integrand(Kind kind, GridFunction target, std::shared_ptr<const GridFunction> w);

    Kind kind_;
    GridFunction target_;
    std::shared_ptr<const GridFunction> linear_weight_; // null for plain tracking
};

/// Control box: lower(x) <= u(x) <= upper(x) nodewise.
class Bounds {
public:
    Bounds(GridFunction lower, GridFunction upper);

    const GridFunction& lower() const { return lower_; }
    const GridFunction& upper() const { return upper_; }

    /// max over nodes of upper - lower.
    double max_gap() const;

private:
    GridFunction lower_;
    GridFunction upper_;
};

class EllipticOperator; // pde module

/// Full problem instance: diffusion coefficient (nodal, uniformly positive),
/// nonlinearity, cost integrand, and control bounds on one grid. The
/// assembled elliptic operator is built once and shared by all solves.
class ProblemSpec {
public:
    ProblemSpec(std::shared_ptr<const Grid> grid, GridFunction diffusion, Nonlinearity f,
                Integrand cost, Bounds bounds);

    /// Convenience for constant diffusion.
    ProblemSpec(std::shared_ptr<const Grid> grid, double diffusion, Nonlinearity f,
                Integrand cost, Bounds bounds);

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    const GridFunction& diffusion() const { return diffusion_; }
    const Nonlinearity& f() const { return f_; }
    const Integrand& cost() const { return cost_; }
    const Bounds& bounds() const { return bounds_; }
    const EllipticOperator& op() const { return *op_; }

private:
    std::shared_ptr<const Grid> grid_;
    GridFunction diffusion_;
    Nonlinearity f_;
    Integrand cost_;
    Bounds bounds_;
    std::shared_ptr<const EllipticOperator> op_;
};

/// Additive disturbance pair: e_J enters the adjoint right-hand side, e_y the
/// state-equation right-hand side.
struct Perturbation {
    GridFunction e_J;
    GridFunction e_y;

    static Perturbation zero(std::shared_ptr<const Grid> grid) {
        return {GridFunction::zeros(grid), GridFunction::zeros(grid)};
    }
};

/// Sum norm ||e_J||_{L2} + ||e_y||_{L2}.
double norm_E(const Perturbation& e);

/// Nodewise clamp of u into the box. Idempotent.
GridFunction project_admissible(const GridFunction& u, const Bounds& b);

/// Quadrature measure of the set where u sits strictly between the bounds
/// beyond tol * (upper - lower). Zero for a pure two-level control.
double bang_bang_residual(const GridFunction& u, const Bounds& b, double tol = 1e-6);

} // namespace bangbang
