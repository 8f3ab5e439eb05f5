#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "bangbang/grid.hpp"
#include "bangbang/optimizer.hpp"
#include "bangbang/stability.hpp"

namespace bangbang {

/// Shortest round-trip decimal form of a double. All file output goes through
/// this, which makes runs byte-for-byte reproducible and lets readers recover
/// the exact stored values.
std::string format_double(double v);

/// CSV with header "x,value" (1D) or "x,y,value" (2D), one row per node in
/// flat (lexicographic) order, LF line endings.
void write_grid_function_csv(std::ostream& out, const GridFunction& f);
void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& f);

/// Read a grid function written by write_grid_function_csv. The node
/// coordinates must match the given grid to 1e-12; anything else is a parse
/// error.
GridFunction read_grid_function_csv(std::istream& in, std::shared_ptr<const Grid> grid);
GridFunction read_grid_function_csv(const std::filesystem::path& path,
                                    std::shared_ptr<const Grid> grid);

/// CSV "iter,J,gap,step,bb_residual".
void write_trace_csv(std::ostream& out, const SolveTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const SolveTrace& trace);

/// CSV "t,norm_e,dist_l1,dist_l2,gap,iters".
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);

/// CSV "epsilon,measure".
void write_measure_fit_csv(std::ostream& out, const MeasureFit& fit);
void write_measure_fit_csv(const std::filesystem::path& path, const MeasureFit& fit);

} // namespace bangbang
