#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualport/cli.hpp"
#include "dualport/example_oracle.hpp"
#include "dualport/io.hpp"

using namespace dualport;
namespace fs = std::filesystem;

namespace {

std::string nonconcave_config(const std::string& extra = "") {
    return R"({
      "market": { "r": 0.05, "mu": [0.086], "sigma": [[0.3]], "T": 10.0 },
      "utility": {
        "L": 0.0, "domain_open": false,
        "segments": [
          { "kind": "constant", "a": 0.0, "x_lo": 0.0, "x_hi": 1.0 },
          { "kind": "log_shifted", "a": 1.0, "b": 1.0, "c": 0.0, "x_lo": 1.0, "x_hi": "inf" }
        ],
        "breakpoint_values": [0.0]
      })" + extra +
           "\n}";
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<std::vector<double>> read_csv(const fs::path& file,
                                          std::vector<std::string>* header = nullptr) {
    std::ifstream in(file);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    if (header) {
        std::stringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header->push_back(cell);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string cell;
        rows.emplace_back();
        while (std::getline(ls, cell, ',')) rows.back().push_back(std::strtod(cell.c_str(), nullptr));
    }
    return rows;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("full document round trip") {
        const RunConfig cfg = parse_config(nonconcave_config(
            R"(, "grid": {"t_values":[0.0],"x_min":1.0,"x_max":2.0,"x_count":3},
               "simulate": {"x0":2.0,"n_paths":10,"n_steps":5,"seed":1},
               "output": {"directory":"o","formats":["csv","svg"]},
               "quadrature": {"rel_tol":1e-10}, "workers": 2)"));
        CHECK(cfg.T == 10.0);
        CHECK(cfg.segments.size() == 2);
        CHECK(cfg.grid->x_values() == std::vector<double>{1.0, 1.5, 2.0});
        CHECK(cfg.simulate->n_paths == 10);
        CHECK(cfg.output.svg);
        CHECK(cfg.quadrature.rel_tol == 1e-10);
        CHECK(cfg.workers == 2);
    }

    SUBCASE("unknown keys are rejected at every level") {
        CHECK_THROWS_AS(parse_config(R"({"market":{}, "utility":{}, "bogus": 1})"),
                        config_error);
        CHECK_THROWS_AS(parse_config(nonconcave_config(R"(, "grid": {"zzz": 1})")),
                        config_error);
        std::string bad = nonconcave_config();
        bad.replace(bad.find("\"r\""), 3, "\"rr\"");
        CHECK_THROWS_AS(parse_config(bad), config_error);
    }

    SUBCASE("segment kind key discipline") {
        CHECK_THROWS_AS(
            parse_config(R"({"market":{"r":0,"mu":[0.1],"sigma":[[0.2]],"T":1},
              "utility":{"L":0,"segments":[{"kind":"constant","b":2.0,"x_lo":0.0}],
              "breakpoint_values":[]}})"),
            config_error);
    }

    SUBCASE("malformed json and missing blocks") {
        CHECK_THROWS_AS(parse_config("{"), config_error);
        CHECK_THROWS_AS(parse_config(R"({"utility": {}})"), config_error);
        CHECK_THROWS_AS(load_config_file("/nonexistent/path.json"), config_error);
    }
}

TEST_CASE("cmd_validate exit codes") {
    TempDir dir("dualport_test_validate");
    std::ostringstream log;
    cli::RunContext ctx{dir.path.string(), 0};

    SUBCASE("non-concave example warns (exit 2)") {
        const RunConfig cfg = parse_config(nonconcave_config());
        CHECK(cli::cmd_validate(cfg, ctx, log) == cli::kWarnings);
        CHECK(fs::exists(dir.path / "validate_report.json"));
        CHECK(log.str().find("[warn]") != std::string::npos);
    }

    SUBCASE("log utility passes (exit 0)") {
        const RunConfig cfg = parse_config(
            R"({"market":{"r":0.05,"mu":[0.086],"sigma":[[0.3]],"T":10.0},
                "utility":{"L":0.0,"domain_open":true,
                  "segments":[{"kind":"log_shifted","x_lo":0.0}],
                  "breakpoint_values":[]}})");
        CHECK(cli::cmd_validate(cfg, ctx, log) == cli::kOk);
    }

    SUBCASE("singular volatility fails (exit 1)") {
        const RunConfig cfg = parse_config(
            R"({"market":{"r":0.05,"mu":[0.1,0.1],"sigma":[[0.2,0.2],[0.2,0.2]],"T":1.0},
                "utility":{"L":0.0,"domain_open":true,
                  "segments":[{"kind":"log_shifted","x_lo":0.0}],
                  "breakpoint_values":[]}})");
        CHECK(cli::cmd_validate(cfg, ctx, log) == cli::kHardFail);
    }

    SUBCASE("gap-tiled segments fail (exit 1)") {
        const RunConfig cfg = parse_config(
            R"({"market":{"r":0.05,"mu":[0.086],"sigma":[[0.3]],"T":10.0},
                "utility":{"L":0.0,"domain_open":false,
                  "segments":[{"kind":"constant","x_lo":0.0,"x_hi":1.0},
                              {"kind":"log_shifted","x_lo":1.5}],
                  "breakpoint_values":[0.0]}})");
        CHECK(cli::cmd_validate(cfg, ctx, log) == cli::kHardFail);
    }
}

TEST_CASE("cmd_grid emits surfaces matching the closed forms") {
    TempDir dir("dualport_test_grid");
    std::ostringstream log;
    cli::RunContext ctx{dir.path.string(), 0};

    RunConfig cfg = parse_config(nonconcave_config(
        R"(, "grid": {"t_values":[0.0,2.5,5.0,7.5,9.99],
                      "x_min":0.25,"x_max":10.0,"x_count":40},
            "output": {"directory":"unused","formats":["csv","svg"]})"));
    REQUIRE(cli::cmd_grid(cfg, ctx, log) == cli::kOk);

    std::vector<std::string> header;
    const auto u_rows = read_csv(dir.path / "u_surface.csv", &header);
    CHECK(header == std::vector<std::string>{"t", "x", "u"});
    CHECK(u_rows.size() == 200);  // 5 slices x 40 points
    const auto l_rows = read_csv(dir.path / "lambda_surface.csv");
    CHECK(l_rows.size() == 200);
    CHECK(fs::exists(dir.path / "u_surface.svg"));
    CHECK(fs::exists(dir.path / "lambda_surface.svg"));

    const example_oracle::ExampleParams p;
    for (const auto& row : u_rows) {
        const double oracle = example_oracle::oracle_u(p, row[0], row[1]);
        CHECK(std::fabs(row[2] - oracle) <= 1e-6 * std::fabs(oracle));
    }

    // late multiplier slice approaches the terminal transform on [1.5, 10]
    for (const auto& row : l_rows) {
        if (row[0] != 9.99 || row[1] < 1.5) continue;
        CHECK(std::fabs(row[2] - 1.0 / row[1]) <= 0.05);
    }

    SUBCASE("grid outside the domain exits 1") {
        RunConfig bad = cfg;
        bad.grid->x_min = -1.0;
        std::ostringstream log2;
        CHECK(cli::cmd_grid(bad, ctx, log2) == cli::kHardFail);
        CHECK(log2.str().find("outside") != std::string::npos);
    }
}

TEST_CASE("cmd_verify passes on the example and reports errors") {
    TempDir dir("dualport_test_verify");
    std::ostringstream log;
    cli::RunContext ctx{dir.path.string(), 0};

    RunConfig cfg = parse_config(nonconcave_config(
        R"(, "grid": {"t_values":[0.0,5.0,9.9],"x_min":0.3,"x_max":6.0,"x_count":5,
                      "x_spacing":"log"})"));
    CHECK(cli::cmd_verify(cfg, ctx, log) == cli::kOk);
    CHECK(fs::exists(dir.path / "verify_report.json"));
    std::vector<std::string> header;
    const auto rows = read_csv(dir.path / "verify_report.csv", &header);
    CHECK(rows.size() == 15);
    CHECK(header.size() == 7);
}

TEST_CASE("cmd_simulate artifacts and determinism") {
    TempDir dir("dualport_test_sim");
    cli::RunContext ctx{dir.path.string(), 0};

    RunConfig cfg = parse_config(nonconcave_config(
        R"(, "simulate": {"x0":2.0,"n_paths":40,"n_steps":16,"seed":11})"));

    std::ostringstream log;
    REQUIRE(cli::cmd_simulate(cfg, ctx, log) == cli::kOk);
    const std::string first_paths = slurp(dir.path / "paths.csv");
    const std::string first_summary = slurp(dir.path / "summary.json");
    CHECK(first_paths.find("path_id,t,xi,wealth,lambda,pi_1") == 0);
    CHECK(first_summary.find("homogeneity_max_rel_err") != std::string::npos);
    CHECK(first_summary.find("euler_decay") != std::string::npos);

    // rerun into a fresh directory: byte-identical outputs
    TempDir dir2("dualport_test_sim2");
    cli::RunContext ctx2{dir2.path.string(), 2};
    std::ostringstream log2;
    REQUIRE(cli::cmd_simulate(cfg, ctx2, log2) == cli::kOk);
    CHECK(slurp(dir2.path / "paths.csv") == first_paths);
    CHECK(slurp(dir2.path / "summary.json") == first_summary);

    SUBCASE("initial wealth below the domain exits 1") {
        RunConfig bad = cfg;
        bad.simulate->x0 = -0.5;
        std::ostringstream log3;
        CHECK(cli::cmd_simulate(bad, ctx, log3) == cli::kHardFail);
        CHECK(log3.str().find("L_hat") != std::string::npos);
    }
}

TEST_CASE("csv cells carry 17 significant digits") {
    CHECK(format_sig17(0.1) == "0.10000000000000001");
    CHECK(format_sig17(1.0) == "1");
    const double v = 0.93413981733560277;
    CHECK(std::strtod(format_sig17(v).c_str(), nullptr) == v);
}
