#include "bangbang/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bangbang {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string() + " for reading");
    return in;
}

double parse_field(std::string_view s, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(std::string("malformed ") + what + " field: \"" + std::string(s) + "\"");
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

} // namespace

void write_grid_function_csv(std::ostream& out, const GridFunction& f) {
    const Grid& g = f.grid();
    out << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
    for (std::size_t k = 0; k < f.size(); ++k) {
        out << format_double(g.coord(k, 0));
        if (g.dim() == 2) out << ',' << format_double(g.coord(k, 1));
        out << ',' << format_double(f[k]) << '\n';
    }
}

void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& f) {
    auto out = open_out(path);
    write_grid_function_csv(out, f);
}

GridFunction read_grid_function_csv(std::istream& in, std::shared_ptr<const Grid> grid) {
    std::string line;
    if (!std::getline(in, line)) throw Error("grid function CSV is empty");
    const std::string expected_header = grid->dim() == 1 ? "x,value" : "x,y,value";
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw Error("grid function CSV header \"" + line + "\" does not match \"" +
                    expected_header + "\"");

    std::vector<double> values(grid->node_count());
    const std::size_t coord_fields = static_cast<std::size_t>(grid->dim());
    for (std::size_t k = 0; k < grid->node_count(); ++k) {
        if (!std::getline(in, line))
            throw Error("grid function CSV ends after " + std::to_string(k) + " rows, expected " +
                        std::to_string(grid->node_count()));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_csv(line);
        if (fields.size() != coord_fields + 1)
            throw Error("grid function CSV row " + std::to_string(k + 2) + " has " +
                        std::to_string(fields.size()) + " fields");
        for (std::size_t a = 0; a < coord_fields; ++a) {
            const double c = parse_field(fields[a], "coordinate");
            if (std::abs(c - grid->coord(k, static_cast<int>(a))) > 1e-12)
                throw Error("grid function CSV row " + std::to_string(k + 2) +
                            " does not match the grid nodes");
        }
        values[k] = parse_field(fields[coord_fields], "value");
    }
    if (std::getline(in, line) && !line.empty())
        throw Error("grid function CSV has trailing rows beyond the node count");
    return GridFunction(std::move(grid), std::move(values));
}

GridFunction read_grid_function_csv(const std::filesystem::path& path,
                                    std::shared_ptr<const Grid> grid) {
    auto in = open_in(path);
    return read_grid_function_csv(in, std::move(grid));
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
    out << "iter,J,gap,step,bb_residual\n";
    for (const IterationRecord& r : trace.iterations) {
        out << r.iter << ',' << format_double(r.j) << ',' << format_double(r.gap) << ','
            << format_double(r.step) << ',' << format_double(r.bb_residual) << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, const SolveTrace& trace) {
    auto out = open_out(path);
    write_trace_csv(out, trace);
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "t,norm_e,dist_l1,dist_l2,gap,iters\n";
    for (const SweepRecord& r : result.records) {
        out << format_double(r.t) << ',' << format_double(r.norm_e) << ','
            << format_double(r.dist_l1) << ',' << format_double(r.dist_l2) << ','
            << format_double(r.gap) << ',' << r.iters << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result) {
    auto out = open_out(path);
    write_sweep_csv(out, result);
}

void write_measure_fit_csv(std::ostream& out, const MeasureFit& fit) {
    out << "epsilon,measure\n";
    for (std::size_t i = 0; i < fit.epsilons.size(); ++i)
        out << format_double(fit.epsilons[i]) << ',' << format_double(fit.measures[i]) << '\n';
}

void write_measure_fit_csv(const std::filesystem::path& path, const MeasureFit& fit) {
    auto out = open_out(path);
    write_measure_fit_csv(out, fit);
}

} // namespace bangbang
