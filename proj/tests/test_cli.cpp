#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bangbang/commands.hpp"
#include "bangbang/io.hpp"

using namespace bangbang;
namespace fs = std::filesystem;

namespace {

RunConfig small_lq_config() {
    RunConfig cfg;
    cfg.problem.cells_x = 256;
    cfg.problem.y_d = "40*sin(9.42477796076938*x)";
    cfg.solver.max_iters = 500;
    cfg.solver.gap_tol = 1e-8;
    cfg.solver.seed = 42;
    cfg.analysis.growth_samples = 100;
    cfg.analysis.cone_samples = 16;
    cfg.analysis.quadratic_samples = 50;
    cfg.analysis.constant_samples = 8;
    return cfg;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("bangbang_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("solve writes artifacts and reports bang-bang structure") {
    TempDir dir("solve");
    RunConfig cfg = small_lq_config();
    CHECK(cmd_solve(cfg, dir.path, 1) == ExitCode::ok);
    for (const char* name : {"solution.csv", "state.csv", "adjoint.csv", "trace.csv"})
        CHECK(fs::exists(dir.path / name));

    // last trace row: gap under tolerance, residual within two cells
    std::ifstream in(dir.path / "trace.csv");
    std::string line, last;
    std::getline(in, line);
    CHECK(line == "iter,J,gap,step,bb_residual");
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    std::istringstream row(last);
    std::string field;
    std::getline(row, field, ','); // iter
    std::getline(row, field, ','); // J
    std::getline(row, field, ',');
    const double gap = std::stod(field);
    std::getline(row, field, ',');
    std::getline(row, field, ',');
    const double bb = std::stod(field);
    CHECK(gap <= cfg.solver.gap_tol);
    CHECK(bb <= 2.0 / 256.0);
}

TEST_CASE("invalid bounds exit with a configuration error") {
    TempDir dir("badbounds");
    RunConfig cfg = small_lq_config();
    cfg.problem.alpha = "1";
    cfg.problem.beta = "-1";
    CHECK(cmd_solve(cfg, dir.path, 1) == ExitCode::error);
}

TEST_CASE("zero iteration budget exits as non-converged with the initial record written") {
    TempDir dir("budget");
    RunConfig cfg = small_lq_config();
    cfg.solver.max_iters = 0;
    CHECK(cmd_solve(cfg, dir.path, 1) == ExitCode::not_converged);
    std::ifstream in(dir.path / "trace.csv");
    int rows = 0;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1);
}

TEST_CASE("analyze verifies a stored solution and writes the report") {
    TempDir dir("analyze");
    RunConfig cfg = small_lq_config();
    REQUIRE(cmd_solve(cfg, dir.path, 1) == ExitCode::ok);
    CHECK(cmd_analyze(cfg, dir.path, 1) == ExitCode::ok);
    CHECK(fs::exists(dir.path / "measure_fit.csv"));

    const std::string json = slurp(dir.path / "analysis.json");
    for (const char* key : {"\"K\"", "\"ae\"", "\"kappa\"", "\"tau\"", "\"delta_min\"", "\"C1\"",
                            "\"C3\"", "\"growth_pass_rate\"", "\"quadratic_growth_pass_rate\""})
        CHECK(json.find(key) != std::string::npos);

    // keys appear in the pinned order
    CHECK(json.find("\"K\"") < json.find("\"ae\""));
    CHECK(json.find("\"ae\"") < json.find("\"kappa\""));
    CHECK(json.find("\"C3\"") < json.find("\"growth_pass_rate\""));
}

TEST_CASE("analyze without artifacts or with corrupted ones is an input error") {
    TempDir dir("missing");
    RunConfig cfg = small_lq_config();
    CHECK(cmd_analyze(cfg, dir.path, 1) == ExitCode::error);

    REQUIRE(cmd_solve(cfg, dir.path, 1) == ExitCode::ok);
    std::ofstream(dir.path / "solution.csv") << "x,value\ngarbage,1\n";
    CHECK(cmd_analyze(cfg, dir.path, 1) == ExitCode::error);
}

TEST_CASE("exact-tracking instances take the superstable path") {
    TempDir dir("superstable");
    RunConfig cfg = small_lq_config();
    cfg.problem.alpha = "0";
    cfg.problem.beta = "0";
    cfg.problem.y_d = "0"; // the only admissible control tracks exactly
    REQUIRE(cmd_solve(cfg, dir.path, 1) == ExitCode::ok);
    CHECK(cmd_analyze(cfg, dir.path, 1) == ExitCode::ok);
    const std::string json = slurp(dir.path / "analysis.json");
    CHECK(json.find("\"K\": null") != std::string::npos);
    CHECK(json.find("\"ae\": null") != std::string::npos);
}

TEST_CASE("perturb runs the direction library and writes verdicts") {
    TempDir dir("perturb");
    RunConfig cfg = small_lq_config();
    REQUIRE(cmd_solve(cfg, dir.path, 1) == ExitCode::ok);
    CHECK(cmd_perturb(cfg, dir.path, 1) == ExitCode::ok);
    for (int k = 0; k < 3; ++k)
        CHECK(fs::exists(dir.path / ("sweep_" + std::to_string(k) + ".csv")));
    const std::string json = slurp(dir.path / "holder_fit.json");
    CHECK(json.find("\"verdict\"") != std::string::npos);
}

TEST_CASE("a zero custom direction yields the superstable verdict") {
    TempDir dir("zerodir");
    RunConfig cfg = small_lq_config();
    cfg.sweep.directions = "custom";
    cfg.sweep.d_grad = "0";
    cfg.sweep.d_state = "0";
    REQUIRE(cmd_solve(cfg, dir.path, 1) == ExitCode::ok);
    CHECK(cmd_perturb(cfg, dir.path, 1) == ExitCode::ok);
    CHECK(slurp(dir.path / "holder_fit.json").find("superstable") != std::string::npos);
}

TEST_CASE("a two-rung ladder surfaces the insufficient-data error") {
    TempDir dir("shortladder");
    RunConfig cfg = small_lq_config();
    cfg.sweep.rungs = 2;
    cfg.sweep.t0 = 5.0; // large enough to move the control at both rungs
    REQUIRE(cmd_solve(cfg, dir.path, 1) == ExitCode::ok);
    CHECK(cmd_perturb(cfg, dir.path, 1) == ExitCode::check_failed);
}

TEST_CASE("perturb refuses a non-converged stored solution") {
    TempDir dir("unconverged");
    RunConfig cfg = small_lq_config();
    cfg.solver.max_iters = 0;
    REQUIRE(cmd_solve(cfg, dir.path, 1) == ExitCode::not_converged);
    CHECK(cmd_perturb(cfg, dir.path, 1) == ExitCode::error);
}

TEST_CASE("identical runs produce byte-identical artifacts") {
    TempDir a("det_a");
    TempDir b("det_b");
    RunConfig cfg = small_lq_config();
    REQUIRE(cmd_solve(cfg, a.path, 1) == ExitCode::ok);
    REQUIRE(cmd_solve(cfg, b.path, 1) == ExitCode::ok);
    REQUIRE(cmd_analyze(cfg, a.path, 1) == ExitCode::ok);
    REQUIRE(cmd_analyze(cfg, b.path, 1) == ExitCode::ok);
    for (const char* name :
         {"solution.csv", "state.csv", "adjoint.csv", "trace.csv", "analysis.json",
          "measure_fit.csv"})
        CHECK(slurp(a.path / name) == slurp(b.path / name));
}

TEST_CASE("sampling loops give the same results on multiple threads") {
    TempDir a("thr_1");
    TempDir b("thr_2");
    RunConfig cfg = small_lq_config();
    REQUIRE(cmd_solve(cfg, a.path, 1) == ExitCode::ok);
    REQUIRE(cmd_solve(cfg, b.path, 2) == ExitCode::ok);
    REQUIRE(cmd_analyze(cfg, a.path, 1) == ExitCode::ok);
    REQUIRE(cmd_analyze(cfg, b.path, 2) == ExitCode::ok);
    CHECK(slurp(a.path / "analysis.json") == slurp(b.path / "analysis.json"));
}
