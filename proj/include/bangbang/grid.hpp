#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "bangbang/errors.hpp"

namespace bangbang {

/// Uniform tensor grid on a box in 1 or 2 dimensions. Nodes are the tensor
/// product of per-axis partitions; quadrature is trapezoidal (tensorized in
/// 2D), so weights are positive and sum exactly to the box measure.
///
/// Flat node ordering is lexicographic by the per-axis index tuple with the
/// x index major: k = ix in 1D, k = ix * (cells_y + 1) + iy in 2D.
class Grid {
public:
    static std::shared_ptr<const Grid> make(std::span<const double> lo,
                                            std::span<const double> hi,
                                            std::span<const int> cells);

    static std::shared_ptr<const Grid> make_1d(double lo, double hi, int cells);
    static std::shared_ptr<const Grid> make_2d(double lo_x, double hi_x, int cells_x,
                                               double lo_y, double hi_y, int cells_y);

    int dim() const { return dim_; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    int cells(int axis) const { return cells_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    std::size_t axis_nodes(int axis) const { return static_cast<std::size_t>(cells_[axis]) + 1; }

    std::size_t node_count() const { return weights_.size(); }
    std::size_t interior_count() const { return interior_nodes_.size(); }

    bool is_boundary(std::size_t node) const { return boundary_[node] != 0; }

    /// Index of a node among interior nodes, or -1 for boundary nodes.
    std::ptrdiff_t interior_index(std::size_t node) const { return interior_index_[node]; }

    /// Flat index of the k-th interior node.
    std::size_t interior_node(std::size_t k) const { return interior_nodes_[k]; }

    double weight(std::size_t node) const { return weights_[node]; }
    std::span<const double> weights() const { return weights_; }

    double coord(std::size_t node, int axis) const {
        const std::size_t i = axis_index(node, axis);
        return lo_[axis] + static_cast<double>(i) * spacing_[axis];
    }

    /// Per-axis node index of a flat node index.
    std::size_t axis_index(std::size_t node, int axis) const {
        if (dim_ == 1) return node;
        return axis == 0 ? node / axis_nodes(1) : node % axis_nodes(1);
    }

    std::size_t flat_index(std::size_t ix, std::size_t iy = 0) const {
        return dim_ == 1 ? ix : ix * axis_nodes(1) + iy;
    }

    /// Box measure |Omega|.
    double measure() const { return measure_; }
    double max_spacing() const;

    bool same_shape(const Grid& other) const;

private:
    Grid() = default;

    int dim_ = 0;
    std::array<double, 2> lo_{};
    std::array<double, 2> hi_{};
    std::array<int, 2> cells_{};
    std::array<double, 2> spacing_{};
    double measure_ = 0.0;
    std::vector<double> weights_;
    std::vector<std::uint8_t> boundary_;
    std::vector<std::ptrdiff_t> interior_index_;
    std::vector<std::size_t> interior_nodes_;
};

/// Nodal scalar field on a grid. Immutable after construction.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const Grid> grid, std::vector<double> values);

    static GridFunction zeros(std::shared_ptr<const Grid> grid);
    static GridFunction constant(std::shared_ptr<const Grid> grid, double value);

    template <class F>
    static GridFunction sample(std::shared_ptr<const Grid> grid, F&& f) {
        std::vector<double> v(grid->node_count());
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double x = grid->coord(k, 0);
            const double y = grid->dim() == 2 ? grid->coord(k, 1) : 0.0;
            v[k] = f(x, y);
        }
        return GridFunction(std::move(grid), std::move(v));
    }

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t k) const { return values_[k]; }
    std::span<const double> values() const { return values_; }

    bool zero_on_boundary(double tol = 0.0) const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> values_;
};

void require_same_grid(const GridFunction& f, const GridFunction& g);

enum class NormKind { l1, l2, linf };

/// Discrete L^p norm: quadrature for p in {1,2}, nodal max for p = inf.
double lp_norm(const GridFunction& f, NormKind p);

/// Quadrature measure of { x : |f(x)| <= eps }. Nodal indicator weighted by
/// the trapezoidal weights; O(h)-accurate, monotone in eps, bounded by the
/// box measure.
double level_set_measure(const GridFunction& f, double eps);

/// Quadrature approximation of the L2 pairing of f and g.
double inner_product(const GridFunction& f, const GridFunction& g);

/// Discrete H1 seminorm from per-edge forward differences; used as part of
/// the Y-norm proxy when estimating solution-map Lipschitz constants.
double h1_seminorm(const GridFunction& f);

// Pointwise algebra. Every call returns a fresh function on the same grid.
GridFunction add(const GridFunction& f, const GridFunction& g);
GridFunction sub(const GridFunction& f, const GridFunction& g);
GridFunction scaled(const GridFunction& f, double c);
/// (1 - t) * u + t * v, the convex combination used by the optimizer.
GridFunction convex_combo(const GridFunction& u, const GridFunction& v, double t);

} // namespace bangbang
