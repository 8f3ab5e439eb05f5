#include "bangbang/model.hpp"

#include <algorithm>
#include <cmath>

#include "bangbang/pde.hpp"

namespace bangbang {

Nonlinearity::Nonlinearity(Kind kind, double c) : kind_(kind), coeff_(c) {
    if (c < 0.0)
        throw InvalidModelError("nonlinearity coefficient must be >= 0 to keep df/dy >= 0");
}

double Nonlinearity::value(double y) const {
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::linear: return coeff_ * y;
    case Kind::cubic: return coeff_ * y * y * y;
    case Kind::saturating: return coeff_ * (y + y * y * y / 3.0);
    }
    return 0.0;
}

double Nonlinearity::dy(double y) const {
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::linear: return coeff_;
    case Kind::cubic: return 3.0 * coeff_ * y * y;
    case Kind::saturating: return coeff_ * (1.0 + y * y);
    }
    return 0.0;
}

double Nonlinearity::dyy(double y) const {
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::linear: return 0.0;
    case Kind::cubic: return 6.0 * coeff_ * y;
    case Kind::saturating: return 2.0 * coeff_ * y;
    }
    return 0.0;
}

Integrand::Integrand(Kind kind, GridFunction target, std::shared_ptr<const GridFunction> w)
    : kind_(kind), target_(std::move(target)), linear_weight_(std::move(w)) {}

Integrand Integrand::tracking(GridFunction target) {
    return Integrand(Kind::tracking, std::move(target), nullptr);
}

Integrand Integrand::tracking_plus_linear(GridFunction target, GridFunction linear_weight) {
    require_same_grid(target, linear_weight);
    return Integrand(Kind::tracking_plus_linear, std::move(target),
                     std::make_shared<const GridFunction>(std::move(linear_weight)));
}

double Integrand::value(std::size_t node, double y) const {
    const double d = y - target_[node];
    double v = 0.5 * d * d;
    if (kind_ == Kind::tracking_plus_linear) v += (*linear_weight_)[node] * y;
    return v;
}

double Integrand::dy(std::size_t node, double y) const {
    double v = y - target_[node];
    if (kind_ == Kind::tracking_plus_linear) v += (*linear_weight_)[node];
    return v;
}

double Integrand::dyy(std::size_t, double) const { return 1.0; }

Bounds::Bounds(GridFunction lower, GridFunction upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_grid(lower_, upper_);
    for (std::size_t k = 0; k < lower_.size(); ++k)
        if (!(lower_[k] <= upper_[k]))
            throw InvalidModelError("bounds violate lower <= upper at node " + std::to_string(k));
}

double Bounds::max_gap() const {
    double m = 0.0;
    for (std::size_t k = 0; k < lower_.size(); ++k) m = std::max(m, upper_[k] - lower_[k]);
    return m;
}

ProblemSpec::ProblemSpec(std::shared_ptr<const Grid> grid, GridFunction diffusion, Nonlinearity f,
                         Integrand cost, Bounds bounds)
    : grid_(std::move(grid)),
      diffusion_(std::move(diffusion)),
      f_(f),
      cost_(std::move(cost)),
      bounds_(std::move(bounds)) {
    if (!diffusion_.grid().same_shape(*grid_) || !cost_.target().grid().same_shape(*grid_) ||
        !bounds_.lower().grid().same_shape(*grid_))
        throw IncompatibleGridsError("problem pieces live on different grids");
    for (std::size_t k = 0; k < diffusion_.size(); ++k)
        if (!(diffusion_[k] > 0.0))
            throw InvalidModelError("diffusion coefficient must be strictly positive");
    op_ = std::make_shared<const EllipticOperator>(EllipticOperator::assemble(*grid_, diffusion_));
}

ProblemSpec::ProblemSpec(std::shared_ptr<const Grid> grid, double diffusion, Nonlinearity f,
                         Integrand cost, Bounds bounds)
    : ProblemSpec(grid, GridFunction::constant(grid, diffusion), f, std::move(cost),
                  std::move(bounds)) {}

double norm_E(const Perturbation& e) {
    require_same_grid(e.e_J, e.e_y);
    return lp_norm(e.e_J, NormKind::l2) + lp_norm(e.e_y, NormKind::l2);
}

GridFunction project_admissible(const GridFunction& u, const Bounds& b) {
    require_same_grid(u, b.lower());
    std::vector<double> v(u.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = std::min(std::max(u[k], b.lower()[k]), b.upper()[k]);
    return GridFunction(u.grid_ptr(), std::move(v));
}

double bang_bang_residual(const GridFunction& u, const Bounds& b, double tol) {
    require_same_grid(u, b.lower());
    const Grid& g = u.grid();
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double gap = b.upper()[k] - b.lower()[k];
        const double inside = std::min(u[k] - b.lower()[k], b.upper()[k] - u[k]);
        if (inside > tol * gap) s += g.weight(k);
    }
    return s;
}

} // namespace bangbang
