#include "bangbang/pde.hpp"

#include <algorithm>
#include <cmath>

namespace bangbang {

namespace {

struct Neighbor {
    std::ptrdiff_t offset_x; // in axis-node indices
    std::ptrdiff_t offset_y;
};

} // namespace

EllipticOperator EllipticOperator::assemble(const Grid& grid, const GridFunction& diffusion) {
    EllipticOperator op;
    const std::size_t n = grid.interior_count();
    op.row_ptr_.assign(n + 1, 0);
    op.diag_.assign(n, 0.0);

    const int dim = grid.dim();
    // Face coefficient between two adjacent nodes: arithmetic mean of the
    // nodal diffusion values, divided by h^2 for that axis.
    auto face = [&](std::size_t a, std::size_t b, int axis) {
        const double h = grid.spacing(axis);
        return 0.5 * (diffusion[a] + diffusion[b]) / (h * h);
    };

    std::vector<std::pair<std::size_t, double>> row;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t k = grid.interior_node(r);
        row.clear();
        double diag = 0.0;
        for (int axis = 0; axis < dim; ++axis) {
            const std::size_t i = grid.axis_index(k, axis);
            for (int dir = -1; dir <= 1; dir += 2) {
                const std::size_t j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + dir);
                std::size_t nb;
                if (dim == 1) {
                    nb = j;
                } else {
                    const std::size_t ox = axis == 0 ? j : grid.axis_index(k, 0);
                    const std::size_t oy = axis == 1 ? j : grid.axis_index(k, 1);
                    nb = grid.flat_index(ox, oy);
                }
                const double c = face(k, nb, axis);
                diag += c;
                const std::ptrdiff_t nb_int = grid.interior_index(nb);
                if (nb_int >= 0) row.emplace_back(static_cast<std::size_t>(nb_int), -c);
                // Boundary neighbors are eliminated: the value there is zero.
            }
        }
        op.diag_[r] = diag;
        std::sort(row.begin(), row.end());
        rows[r] = row;
    }

    std::size_t nnz = 0;
    for (std::size_t r = 0; r < n; ++r) {
        op.row_ptr_[r] = nnz;
        nnz += rows[r].size() + 1; // off-diagonals plus the diagonal
    }
    op.row_ptr_[n] = nnz;
    op.col_.resize(nnz);
    op.val_.resize(nnz);
    for (std::size_t r = 0, p = 0; r < n; ++r) {
        bool placed_diag = false;
        for (const auto& [c, v] : rows[r]) {
            if (!placed_diag && c > r) {
                op.col_[p] = r;
                op.val_[p++] = op.diag_[r];
                placed_diag = true;
            }
            op.col_[p] = c;
            op.val_[p++] = v;
        }
        if (!placed_diag) {
            op.col_[p] = r;
            op.val_[p++] = op.diag_[r];
        }
    }
    return op;
}

void EllipticOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += val_[p] * x[col_[p]];
        y[r] = s;
    }
}

void EllipticOperator::for_each_entry(
    const std::function<void(std::size_t, std::size_t, double)>& fn) const {
    for (std::size_t r = 0; r < size(); ++r)
        for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) fn(r, col_[p], val_[p]);
}

namespace {

// Jacobi-preconditioned conjugate gradient for M + diag(shift). Deterministic:
// fixed iteration order, no reductions that depend on scheduling.
bool pcg(const EllipticOperator& op, std::span<const double> shift, std::span<const double> b,
         std::vector<double>& x, double rel_tol, std::size_t max_iter) {
    const std::size_t n = op.size();
    x.assign(n, 0.0);

    double b_norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) b_norm2 += b[i] * b[i];
    if (b_norm2 == 0.0) return true;
    const double tol2 = rel_tol * rel_tol * b_norm2;

    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n), p(n), q(n);
    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / (op.diagonal()[i] + shift[i]);
    };

    precondition(r, z);
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    for (std::size_t it = 0; it < max_iter; ++it) {
        op.apply(p, q);
        for (std::size_t i = 0; i < n; ++i) q[i] += shift[i] * p[i];
        double pq = 0.0;
        for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
        if (pq <= 0.0) return false; // lost positive definiteness
        const double alpha = rz / pq;
        double r_norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            r_norm2 += r[i] * r[i];
        }
        if (r_norm2 <= tol2) return true;
        precondition(r, z);
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) rz_next += r[i] * z[i];
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return false;
}

std::vector<double> gather_interior(const Grid& g, const GridFunction& f) {
    std::vector<double> v(g.interior_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[g.interior_node(i)];
    return v;
}

GridFunction scatter_interior(const std::shared_ptr<const Grid>& g, std::span<const double> v) {
    std::vector<double> full(g->node_count(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) full[g->interior_node(i)] = v[i];
    return GridFunction(g, std::move(full));
}

// Quadrature-weighted l2 norm of an interior-node vector.
double weighted_norm(const Grid& g, std::span<const double> r) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double w = g.weight(g.interior_node(i));
        s += w * r[i] * r[i];
    }
    return std::sqrt(s);
}

GridFunction solve_shifted(const ProblemSpec& spec, const GridFunction& y_state,
                           std::span<const double> rhs_interior, const SolverParams& params,
                           const char* what) {
    const Grid& g = spec.grid();
    const std::size_t n = g.interior_count();
    std::vector<double> shift(n);
    for (std::size_t i = 0; i < n; ++i) shift[i] = spec.f().dy(y_state[g.interior_node(i)]);
    std::vector<double> x;
    const std::size_t max_iter = 10 * g.node_count();
    if (!pcg(spec.op(), shift, rhs_interior, x, params.cg_rel_tol, max_iter))
        throw SolverFailureError(std::string(what) + ": conjugate gradient did not converge",
                                 {GridFunction::zeros(spec.grid_ptr()), 0, 0.0, false});
    return scatter_interior(spec.grid_ptr(), x);
}

} // namespace

StateSolveReport solve_state(const ProblemSpec& spec, const GridFunction& rhs,
                             const SolverParams& params) {
    if (!rhs.grid().same_shape(spec.grid()))
        throw IncompatibleGridsError("state solve right-hand side lives on a different grid");
    const Grid& g = spec.grid();
    const std::size_t n = g.interior_count();
    const EllipticOperator& op = spec.op();

    std::vector<double> y(n, 0.0); // initial guess; f(0) = 0 for the whole catalog
    std::vector<double> b = gather_interior(g, rhs);
    std::vector<double> residual(n), my(n), step, y_try(n), r_try(n);

    auto eval_residual = [&](const std::vector<double>& yv, std::vector<double>& out) {
        op.apply(yv, out);
        for (std::size_t i = 0; i < n; ++i)
            out[i] += spec.f().value(yv[i]) - b[i];
    };

    eval_residual(y, residual);
    double res_norm = weighted_norm(g, residual);

    int iter = 0;
    while (res_norm > params.newton_tol) {
        if (iter >= params.max_newton) {
            StateSolveReport rep{scatter_interior(spec.grid_ptr(), y), iter, res_norm, false};
            throw SolverFailureError("state solve: Newton budget exhausted, residual " +
                                         std::to_string(res_norm),
                                     std::move(rep));
        }
        std::vector<double> shift(n), neg_r(n);
        for (std::size_t i = 0; i < n; ++i) {
            shift[i] = spec.f().dy(y[i]);
            neg_r[i] = -residual[i];
        }
        const std::size_t max_iter = 10 * g.node_count();
        if (!pcg(op, shift, neg_r, step, params.cg_rel_tol, max_iter)) {
            StateSolveReport rep{scatter_interior(spec.grid_ptr(), y), iter, res_norm, false};
            throw SolverFailureError("state solve: inner conjugate gradient stalled",
                                     std::move(rep));
        }

        // Undamped step first; halve while the residual norm fails to drop.
        double t = 1.0;
        bool accepted = false;
        for (int d = 0; d <= params.max_damping; ++d) {
            for (std::size_t i = 0; i < n; ++i) y_try[i] = y[i] + t * step[i];
            eval_residual(y_try, r_try);
            const double try_norm = weighted_norm(g, r_try);
            if (try_norm < res_norm) {
                y.swap(y_try);
                residual.swap(r_try);
                res_norm = try_norm;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        ++iter;
        if (!accepted) {
            StateSolveReport rep{scatter_interior(spec.grid_ptr(), y), iter, res_norm, false};
            throw SolverFailureError("state solve: damping failed to reduce the residual",
                                     std::move(rep));
        }
    }

    return {scatter_interior(spec.grid_ptr(), y), iter, res_norm, true};
}

GridFunction solve_linearized(const ProblemSpec& spec, const GridFunction& y,
                              const GridFunction& v, const SolverParams& params) {
    require_same_grid(y, v);
    const Grid& g = spec.grid();
    std::vector<double> b = gather_interior(g, v);
    return solve_shifted(spec, y, b, params, "linearized solve");
}

GridFunction solve_second_order(const ProblemSpec& spec, const GridFunction& y,
                                const GridFunction& z1, const GridFunction& z2,
                                const SolverParams& params) {
    require_same_grid(z1, z2);
    const Grid& g = spec.grid();
    const std::size_t n = g.interior_count();
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = g.interior_node(i);
        // grouping keeps the right-hand side bit-identical under z1 <-> z2
        b[i] = -spec.f().dyy(y[k]) * (z1[k] * z2[k]);
    }
    return solve_shifted(spec, y, b, params, "second-order solve");
}

GridFunction solve_adjoint(const ProblemSpec& spec, const GridFunction& y,
                           const SolverParams& params) {
    const Grid& g = spec.grid();
    const std::size_t n = g.interior_count();
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = g.interior_node(i);
        b[i] = spec.cost().dy(k, y[k]);
    }
    return solve_shifted(spec, y, b, params, "adjoint solve");
}

GridFunction solve_perturbed_adjoint(const ProblemSpec& spec, const GridFunction& y,
                                     const GridFunction& e_J, const SolverParams& params) {
    require_same_grid(y, e_J);
    const Grid& g = spec.grid();
    const std::size_t n = g.interior_count();
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = g.interior_node(i);
        b[i] = spec.cost().dy(k, y[k]) + e_J[k];
    }
    return solve_shifted(spec, y, b, params, "perturbed adjoint solve");
}

} // namespace bangbang
