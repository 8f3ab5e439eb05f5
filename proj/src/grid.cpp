#include "bangbang/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bangbang {

std::shared_ptr<const Grid> Grid::make(std::span<const double> lo,
                                       std::span<const double> hi,
                                       std::span<const int> cells) {
    const std::size_t dim = cells.size();
    if (dim < 1 || dim > 2 || lo.size() != dim || hi.size() != dim)
        throw InvalidGridError("grid dimension must be 1 or 2");
    for (std::size_t a = 0; a < dim; ++a) {
        if (!(hi[a] > lo[a]))
            throw InvalidGridError("grid extent is empty on axis " + std::to_string(a));
        if (cells[a] < 2)
            throw InvalidGridError("grid needs at least 2 cells per axis, got " +
                                   std::to_string(cells[a]));
    }

    auto g = std::shared_ptr<Grid>(new Grid());
    g->dim_ = static_cast<int>(dim);
    std::size_t n_nodes = 1;
    for (std::size_t a = 0; a < dim; ++a) {
        g->lo_[a] = lo[a];
        g->hi_[a] = hi[a];
        g->cells_[a] = cells[a];
        g->spacing_[a] = (hi[a] - lo[a]) / static_cast<double>(cells[a]);
        n_nodes *= static_cast<std::size_t>(cells[a]) + 1;
    }
    g->measure_ = (hi[0] - lo[0]) * (dim == 2 ? hi[1] - lo[1] : 1.0);

    g->weights_.resize(n_nodes);
    g->boundary_.resize(n_nodes);
    g->interior_index_.assign(n_nodes, -1);

    auto axis_weight = [&](int axis, std::size_t i) {
        const double h = g->spacing_[axis];
        const std::size_t last = g->axis_nodes(axis) - 1;
        return (i == 0 || i == last) ? 0.5 * h : h;
    };

    for (std::size_t k = 0; k < n_nodes; ++k) {
        double w = 1.0;
        bool boundary = false;
        for (int a = 0; a < g->dim_; ++a) {
            const std::size_t i = g->axis_index(k, a);
            w *= axis_weight(a, i);
            boundary = boundary || i == 0 || i == g->axis_nodes(a) - 1;
        }
        g->weights_[k] = w;
        g->boundary_[k] = boundary ? 1 : 0;
        if (!boundary) {
            g->interior_index_[k] = static_cast<std::ptrdiff_t>(g->interior_nodes_.size());
            g->interior_nodes_.push_back(k);
        }
    }

    double total = 0.0;
    for (double w : g->weights_) total += w;
    if (std::abs(total - g->measure_) > 1e-12 * g->measure_)
        throw InvalidGridError("quadrature weights do not sum to the box measure");

    return g;
}

std::shared_ptr<const Grid> Grid::make_1d(double lo, double hi, int cells) {
    const double l[] = {lo};
    const double h[] = {hi};
    const int c[] = {cells};
    return make(l, h, c);
}

std::shared_ptr<const Grid> Grid::make_2d(double lo_x, double hi_x, int cells_x,
                                          double lo_y, double hi_y, int cells_y) {
    const double l[] = {lo_x, lo_y};
    const double h[] = {hi_x, hi_y};
    const int c[] = {cells_x, cells_y};
    return make(l, h, c);
}

double Grid::max_spacing() const {
    double m = 0.0;
    for (int a = 0; a < dim_; ++a) m = std::max(m, spacing_[a]);
    return m;
}

bool Grid::same_shape(const Grid& other) const {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (lo_[a] != other.lo_[a] || hi_[a] != other.hi_[a] || cells_[a] != other.cells_[a])
            return false;
    }
    return true;
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->node_count())
        throw InvalidGridError("grid function has " + std::to_string(values_.size()) +
                               " values for " + std::to_string(grid_->node_count()) + " nodes");
}

GridFunction GridFunction::zeros(std::shared_ptr<const Grid> grid) {
    std::vector<double> v(grid->node_count(), 0.0);
    return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::constant(std::shared_ptr<const Grid> grid, double value) {
    std::vector<double> v(grid->node_count(), value);
    return GridFunction(std::move(grid), std::move(v));
}

bool GridFunction::zero_on_boundary(double tol) const {
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (grid_->is_boundary(k) && std::abs(values_[k]) > tol) return false;
    return true;
}

void require_same_grid(const GridFunction& f, const GridFunction& g) {
    if (f.grid_ptr() == g.grid_ptr()) return;
    if (!f.grid().same_shape(g.grid()))
        throw IncompatibleGridsError("grid functions live on different grids");
}

double lp_norm(const GridFunction& f, NormKind p) {
    const Grid& g = f.grid();
    switch (p) {
    case NormKind::l1: {
        double s = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) s += g.weight(k) * std::abs(f[k]);
        return s;
    }
    case NormKind::l2: {
        double s = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) s += g.weight(k) * f[k] * f[k];
        return std::sqrt(s);
    }
    case NormKind::linf: {
        double m = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f[k]));
        return m;
    }
    }
    return 0.0;
}

double level_set_measure(const GridFunction& f, double eps) {
    if (!(eps > 0.0)) throw InvalidModelError("level_set_measure needs eps > 0");
    double s = 0.0;
    const Grid& g = f.grid();
    for (std::size_t k = 0; k < f.size(); ++k)
        if (std::abs(f[k]) <= eps) s += g.weight(k);
    return s;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g);
    double s = 0.0;
    const Grid& gr = f.grid();
    for (std::size_t k = 0; k < f.size(); ++k) s += gr.weight(k) * f[k] * g[k];
    return s;
}

double h1_seminorm(const GridFunction& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    if (g.dim() == 1) {
        const double h = g.spacing(0);
        for (std::size_t i = 0; i + 1 < g.axis_nodes(0); ++i) {
            const double d = (f[i + 1] - f[i]) / h;
            s += h * d * d;
        }
    } else {
        const double hx = g.spacing(0);
        const double hy = g.spacing(1);
        const std::size_t nx = g.axis_nodes(0);
        const std::size_t ny = g.axis_nodes(1);
        // Each x-edge carries measure hx * (trapezoid weight in y), and
        // symmetrically for y-edges.
        auto yw = [&](std::size_t j) { return (j == 0 || j == ny - 1) ? 0.5 * hy : hy; };
        auto xw = [&](std::size_t i) { return (i == 0 || i == nx - 1) ? 0.5 * hx : hx; };
        for (std::size_t i = 0; i + 1 < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j) {
                const double d = (f[g.flat_index(i + 1, j)] - f[g.flat_index(i, j)]) / hx;
                s += hx * yw(j) * d * d;
            }
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j + 1 < ny; ++j) {
                const double d = (f[g.flat_index(i, j + 1)] - f[g.flat_index(i, j)]) / hy;
                s += hy * xw(i) * d * d;
            }
    }
    return std::sqrt(s);
}

GridFunction add(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g);
    std::vector<double> v(f.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f[k] + g[k];
    return GridFunction(f.grid_ptr(), std::move(v));
}

GridFunction sub(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g);
    std::vector<double> v(f.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f[k] - g[k];
    return GridFunction(f.grid_ptr(), std::move(v));
}

GridFunction scaled(const GridFunction& f, double c) {
    std::vector<double> v(f.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = c * f[k];
    return GridFunction(f.grid_ptr(), std::move(v));
}

GridFunction convex_combo(const GridFunction& u, const GridFunction& v, double t) {
    require_same_grid(u, v);
    std::vector<double> r(u.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = (1.0 - t) * u[k] + t * v[k];
    return GridFunction(u.grid_ptr(), std::move(r));
}

} // namespace bangbang
