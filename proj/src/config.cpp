#include "bangbang/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bangbang/expression.hpp"
#include "bangbang/io.hpp"
#include "bangbang/rng.hpp"

namespace bangbang {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_double(std::string_view v, int line, const std::string& key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        fail(line, key + " expects a number, got \"" + std::string(v) + "\"");
    return out;
}

int parse_int(std::string_view v, int line, const std::string& key) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        fail(line, key + " expects an integer, got \"" + std::string(v) + "\"");
    return out;
}

std::uint64_t parse_u64(std::string_view v, int line, const std::string& key) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        fail(line, key + " expects an unsigned integer, got \"" + std::string(v) + "\"");
    return out;
}

std::optional<double> parse_auto_double(std::string_view v, int line, const std::string& key) {
    if (v == "auto") return std::nullopt;
    return parse_double(v, line, key);
}

std::optional<std::uint64_t> parse_auto_u64(std::string_view v, int line, const std::string& key) {
    if (v == "auto") return std::nullopt;
    return parse_u64(v, line, key);
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section header");
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "problem" && section != "solver" && section != "analysis" &&
                section != "sweep" && section != "output")
                fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));
        if (section.empty()) fail(line_no, "key \"" + key + "\" appears before any section");

        if (section == "problem") {
            ProblemConfig& p = cfg.problem;
            if (key == "dim") p.dim = parse_int(value, line_no, key);
            else if (key == "x_min") p.x_min = parse_double(value, line_no, key);
            else if (key == "x_max") p.x_max = parse_double(value, line_no, key);
            else if (key == "cells_x") p.cells_x = parse_int(value, line_no, key);
            else if (key == "y_min") p.y_min = parse_double(value, line_no, key);
            else if (key == "y_max") p.y_max = parse_double(value, line_no, key);
            else if (key == "cells_y") p.cells_y = parse_int(value, line_no, key);
            else if (key == "diffusion") p.diffusion = value;
            else if (key == "f") p.f = value;
            else if (key == "f_coeff") p.f_coeff = parse_double(value, line_no, key);
            else if (key == "cost") p.cost = value;
            else if (key == "y_d") p.y_d = value;
            else if (key == "w") p.w = value;
            else if (key == "alpha") p.alpha = value;
            else if (key == "beta") p.beta = value;
            else fail(line_no, "unknown key \"" + key + "\" in [problem]");
        } else if (section == "solver") {
            SolverConfig& s = cfg.solver;
            if (key == "max_iters") s.max_iters = parse_int(value, line_no, key);
            else if (key == "gap_tol") s.gap_tol = parse_double(value, line_no, key);
            else if (key == "seed") s.seed = parse_u64(value, line_no, key);
            else fail(line_no, "unknown key \"" + key + "\" in [solver]");
        } else if (section == "analysis") {
            AnalysisConfig& a = cfg.analysis;
            if (key == "eps_min") a.eps_min = parse_auto_double(value, line_no, key);
            else if (key == "eps_max") a.eps_max = parse_auto_double(value, line_no, key);
            else if (key == "eps_points") a.eps_points = parse_int(value, line_no, key);
            else if (key == "tau") a.tau = parse_auto_double(value, line_no, key);
            else if (key == "growth_samples") a.growth_samples = parse_int(value, line_no, key);
            else if (key == "cone_samples") a.cone_samples = parse_int(value, line_no, key);
            else if (key == "quadratic_samples")
                a.quadratic_samples = parse_int(value, line_no, key);
            else if (key == "quadratic_radius")
                a.quadratic_radius = parse_double(value, line_no, key);
            else if (key == "constant_samples")
                a.constant_samples = parse_int(value, line_no, key);
            else if (key == "seed") a.seed = parse_auto_u64(value, line_no, key);
            else fail(line_no, "unknown key \"" + key + "\" in [analysis]");
        } else if (section == "sweep") {
            SweepConfig& s = cfg.sweep;
            if (key == "directions") s.directions = value;
            else if (key == "d_grad") s.d_grad = value;
            else if (key == "d_state") s.d_state = value;
            else if (key == "t0") s.t0 = parse_double(value, line_no, key);
            else if (key == "ratio") s.ratio = parse_double(value, line_no, key);
            else if (key == "rungs") s.rungs = parse_int(value, line_no, key);
            else if (key == "seed") s.seed = parse_auto_u64(value, line_no, key);
            else fail(line_no, "unknown key \"" + key + "\" in [sweep]");
        } else if (section == "output") {
            if (key == "dir") cfg.output.dir = value;
            else fail(line_no, "unknown key \"" + key + "\" in [output]");
        }
    }

    if (cfg.problem.dim != 1 && cfg.problem.dim != 2)
        throw ConfigError("problem.dim must be 1 or 2, got " + std::to_string(cfg.problem.dim));
    if (cfg.sweep.directions != "all" && cfg.sweep.directions != "custom")
        throw ConfigError("sweep.directions must be \"all\" or \"custom\"");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_serialize(const RunConfig& cfg) {
    std::ostringstream out;
    auto opt_double = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("auto");
    };
    auto opt_u64 = [](const std::optional<std::uint64_t>& v) {
        return v ? std::to_string(*v) : std::string("auto");
    };

    const ProblemConfig& p = cfg.problem;
    out << "[problem]\n";
    out << "dim = " << p.dim << '\n';
    out << "x_min = " << format_double(p.x_min) << '\n';
    out << "x_max = " << format_double(p.x_max) << '\n';
    out << "cells_x = " << p.cells_x << '\n';
    out << "y_min = " << format_double(p.y_min) << '\n';
    out << "y_max = " << format_double(p.y_max) << '\n';
    out << "cells_y = " << p.cells_y << '\n';
    out << "diffusion = " << p.diffusion << '\n';
    out << "f = " << p.f << '\n';
    out << "f_coeff = " << format_double(p.f_coeff) << '\n';
    out << "cost = " << p.cost << '\n';
    out << "y_d = " << p.y_d << '\n';
    out << "w = " << p.w << '\n';
    out << "alpha = " << p.alpha << '\n';
    out << "beta = " << p.beta << '\n';

    const SolverConfig& s = cfg.solver;
    out << "[solver]\n";
    out << "max_iters = " << s.max_iters << '\n';
    out << "gap_tol = " << format_double(s.gap_tol) << '\n';
    out << "seed = " << s.seed << '\n';

    const AnalysisConfig& a = cfg.analysis;
    out << "[analysis]\n";
    out << "eps_min = " << opt_double(a.eps_min) << '\n';
    out << "eps_max = " << opt_double(a.eps_max) << '\n';
    out << "eps_points = " << a.eps_points << '\n';
    out << "tau = " << opt_double(a.tau) << '\n';
    out << "growth_samples = " << a.growth_samples << '\n';
    out << "cone_samples = " << a.cone_samples << '\n';
    out << "quadratic_samples = " << a.quadratic_samples << '\n';
    out << "quadratic_radius = " << format_double(a.quadratic_radius) << '\n';
    out << "constant_samples = " << a.constant_samples << '\n';
    out << "seed = " << opt_u64(a.seed) << '\n';

    const SweepConfig& w = cfg.sweep;
    out << "[sweep]\n";
    out << "directions = " << w.directions << '\n';
    out << "d_grad = " << w.d_grad << '\n';
    out << "d_state = " << w.d_state << '\n';
    out << "t0 = " << format_double(w.t0) << '\n';
    out << "ratio = " << format_double(w.ratio) << '\n';
    out << "rungs = " << w.rungs << '\n';
    out << "seed = " << opt_u64(w.seed) << '\n';

    out << "[output]\n";
    out << "dir = " << cfg.output.dir << '\n';
    return out.str();
}

namespace {

GridFunction eval_field(const std::shared_ptr<const Grid>& grid, const std::string& text,
                        const std::string& field) {
    Expression expr = [&] {
        try {
            return Expression::parse(text);
        } catch (const ConfigError& e) {
            throw ConfigError("problem." + field + ": " + e.what());
        }
    }();
    if (grid->dim() == 1 && expr.uses_y())
        throw ConfigError("problem." + field + " uses coordinate y on a 1-d domain");
    return GridFunction::sample(grid, [&](double x, double y) { return expr.eval(x, y); });
}

} // namespace

ProblemSpec build_problem(const ProblemConfig& pc) {
    std::shared_ptr<const Grid> grid;
    try {
        grid = pc.dim == 1 ? Grid::make_1d(pc.x_min, pc.x_max, pc.cells_x)
                           : Grid::make_2d(pc.x_min, pc.x_max, pc.cells_x, pc.y_min, pc.y_max,
                                           pc.cells_y);
    } catch (const InvalidGridError& e) {
        throw ConfigError(std::string("problem domain: ") + e.what());
    }

    Nonlinearity f = [&] {
        if (pc.f == "zero") return Nonlinearity::zero();
        if (pc.f == "linear") return Nonlinearity::linear(pc.f_coeff);
        if (pc.f == "cubic") return Nonlinearity::cubic(pc.f_coeff);
        if (pc.f == "saturating") return Nonlinearity::saturating(pc.f_coeff);
        throw ConfigError("problem.f: unknown family \"" + pc.f + "\"");
    }();

    GridFunction y_d = eval_field(grid, pc.y_d, "y_d");
    Integrand cost = [&] {
        if (pc.cost == "tracking") return Integrand::tracking(std::move(y_d));
        if (pc.cost == "tracking_plus_linear")
            return Integrand::tracking_plus_linear(std::move(y_d), eval_field(grid, pc.w, "w"));
        throw ConfigError("problem.cost: unknown family \"" + pc.cost + "\"");
    }();

    GridFunction alpha = eval_field(grid, pc.alpha, "alpha");
    GridFunction beta = eval_field(grid, pc.beta, "beta");
    Bounds bounds = [&] {
        try {
            return Bounds(std::move(alpha), std::move(beta));
        } catch (const InvalidModelError& e) {
            throw ConfigError(std::string("problem.alpha/problem.beta: ") + e.what());
        }
    }();

    GridFunction diffusion = eval_field(grid, pc.diffusion, "diffusion");
    try {
        return ProblemSpec(grid, std::move(diffusion), f, std::move(cost), std::move(bounds));
    } catch (const InvalidModelError& e) {
        throw ConfigError(std::string("problem.diffusion: ") + e.what());
    }
}

SolveOptions build_solve_options(const SolverConfig& sc) {
    SolveOptions opts;
    opts.max_iters = sc.max_iters;
    opts.gap_tol = sc.gap_tol;
    opts.seed = derive_stream(sc.seed, "solver");
    return opts;
}

std::uint64_t analysis_seed(const RunConfig& config) {
    return config.analysis.seed ? *config.analysis.seed
                                : derive_stream(config.solver.seed, "analysis");
}

std::uint64_t sweep_seed(const RunConfig& config) {
    return config.sweep.seed ? *config.sweep.seed : derive_stream(config.solver.seed, "sweep");
}

} // namespace bangbang
