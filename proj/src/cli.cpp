#include "dualport/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualport/detail/parallel.hpp"
#include "dualport/dual_field.hpp"
#include "dualport/io.hpp"
#include "dualport/portfolio.hpp"
#include "dualport/validation.hpp"

namespace dualport::cli {

using nlohmann::json;

namespace {

void ensure_out_dir(const RunContext& ctx) {
    if (!ctx.out_dir.empty()) std::filesystem::create_directories(ctx.out_dir);
}

std::string out_path(const RunContext& ctx, const std::string& name) {
    if (ctx.out_dir.empty()) return name;
    return (std::filesystem::path(ctx.out_dir) / name).string();
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cli: cannot write " + path);
    out << doc.dump(2) << "\n";
}

DualField build_field(const RunConfig& cfg) {
    return DualField(cfg.make_market(), EnvelopeBundle(cfg.make_utility()),
                     cfg.quadrature);
}

const GridSpec& require_grid(const RunConfig& cfg) {
    if (!cfg.grid) throw config_error("config: this subcommand needs a 'grid' block");
    return *cfg.grid;
}

}  // namespace

int cmd_validate(const RunConfig& cfg, const RunContext& ctx, std::ostream& log) {
    ensure_out_dir(ctx);
    json doc;
    doc["checks"] = json::array();

    const auto record = [&](const std::string& name, CheckLevel level,
                            const std::string& message) {
        doc["checks"].push_back({{"name", name},
                                 {"level", to_string(level)},
                                 {"message", message}});
        log << "[" << to_string(level) << "] " << name << ": " << message << "\n";
    };

    int exit_code = kOk;
    try {
        const MarketModel market = cfg.make_market();
        record("market.invariants", CheckLevel::pass,
               "theta_norm=" + format_sig17(market.theta_norm()));
    } catch (const std::exception& e) {
        record("market.invariants", CheckLevel::fail, e.what());
        exit_code = kHardFail;
    }

    try {
        const PiecewiseUtility utility = cfg.make_utility();
        const EnvelopeBundle bundle(utility);
        const ValidationReport report = validate_assumptions(utility, bundle);
        for (const CheckEntry& e : report.entries) record(e.name, e.level, e.message);
        if (report.has_growth_estimate) {
            doc["growth"] = {{"C0_hat", report.C0_hat}, {"M_hat", report.M_hat}};
        }
        doc["jump_count"] = bundle.jump_set().size();
        if (exit_code == kOk && report.worst() == CheckLevel::fail) exit_code = kHardFail;
        if (exit_code == kOk && report.worst() == CheckLevel::warn) exit_code = kWarnings;
    } catch (const std::exception& e) {
        record("utility.invariants", CheckLevel::fail, e.what());
        exit_code = kHardFail;
    }

    doc["exit_code"] = exit_code;
    write_json(out_path(ctx, "validate_report.json"), doc);
    log << "validate: exit " << exit_code << "\n";
    return exit_code;
}

int cmd_grid(const RunConfig& cfg, const RunContext& ctx, std::ostream& log) {
    const GridSpec& grid = require_grid(cfg);
    ensure_out_dir(ctx);
    const DualField field = build_field(cfg);
    const std::vector<double> xs = grid.x_values();

    std::vector<double> offending;
    for (double x : xs)
        if (!(x > field.domain().L_hat)) offending.push_back(x);
    for (double t : grid.t_values)
        if (!(t >= 0.0) || !(t < field.market().T())) offending.push_back(t);
    if (!offending.empty()) {
        log << "grid: points outside [0,T) x (L_hat, inf):";
        for (double v : offending) log << " " << format_sig17(v);
        log << "\n";
        return kHardFail;
    }

    CsvTable u_table{{"t", "x", "u"}, {}};
    CsvTable l_table{{"t", "x", "lambda"}, {}};
    const std::size_t nx = xs.size();
    u_table.rows.resize(grid.t_values.size() * nx);
    l_table.rows.resize(grid.t_values.size() * nx);
    detail::parallel_for(
        u_table.rows.size(),
        [&](std::size_t idx) {
            const double t = grid.t_values[idx / nx];
            const double x = xs[idx % nx];
            u_table.rows[idx] = {t, x, field.value_u(t, x)};
            l_table.rows[idx] = {t, x, field.lambda(t, x)};
        },
        ctx.workers);

    if (cfg.output.csv) {
        write_csv(out_path(ctx, "u_surface.csv"), u_table);
        write_csv(out_path(ctx, "lambda_surface.csv"), l_table);
        log << "grid: wrote u_surface.csv and lambda_surface.csv ("
            << u_table.rows.size() << " rows each)\n";
    }
    if (cfg.output.svg) {
        const auto slices = [&](const CsvTable& table) {
            std::vector<PlotSlice> out;
            for (std::size_t ti = 0; ti < grid.t_values.size(); ++ti) {
                PlotSlice s;
                s.label = "t=" + format_sig17(grid.t_values[ti]).substr(0, 6);
                for (std::size_t i = 0; i < nx; ++i) {
                    s.x.push_back(table.rows[ti * nx + i][1]);
                    s.y.push_back(table.rows[ti * nx + i][2]);
                }
                out.push_back(std::move(s));
            }
            return out;
        };
        write_polyline_svg(out_path(ctx, "u_surface.svg"), "value function", "x", "u(t,x)",
                           slices(u_table));
        write_polyline_svg(out_path(ctx, "lambda_surface.svg"), "dynamic multiplier", "x",
                           "lambda(t,x)", slices(l_table));
        log << "grid: wrote u_surface.svg and lambda_surface.svg\n";
    }
    return kOk;
}

int cmd_verify(const RunConfig& cfg, const RunContext& ctx, std::ostream& log) {
    const GridSpec& grid = require_grid(cfg);
    ensure_out_dir(ctx);
    const DualField field = build_field(cfg);

    const VerifyReport report =
        field.verify_identities(grid.t_values, grid.x_values(), ctx.workers);

    CsvTable table{{"t", "x", "y", "err_multiplier", "err_value_slope", "err_fenchel",
                    "err_v_slope"},
                   {}};
    for (const VerifyRow& r : report.rows)
        table.rows.push_back({r.t, r.x, r.y, r.err_multiplier, r.err_value_slope,
                              r.err_fenchel, r.err_v_slope});
    write_csv(out_path(ctx, "verify_report.csv"), table);

    const auto line = [&](const char* name, double err, double tol, bool ok) {
        log << (ok ? "[pass] " : "[FAIL] ") << name << ": max rel err " << err
            << " (tolerance " << tol << ")\n";
    };
    line("multiplier equals conjugate minimiser", report.max_err_multiplier,
         VerifyReport::kTolMultiplier, report.multiplier_ok());
    line("multiplier equals d/dx of value", report.max_err_value_slope,
         VerifyReport::kTolValueSlope, report.value_slope_ok());
    line("value equals v + x*y at the multiplier", report.max_err_fenchel,
         VerifyReport::kTolFenchel, report.fenchel_ok());
    line("dv/dy equals -g", report.max_err_v_slope, VerifyReport::kTolVSlope,
         report.v_slope_ok());

    json doc;
    doc["checks"] = {
        {{"name", "multiplier_vs_conjugate"},
         {"max_rel_err", report.max_err_multiplier},
         {"tolerance", VerifyReport::kTolMultiplier},
         {"pass", report.multiplier_ok()}},
        {{"name", "multiplier_vs_value_slope"},
         {"max_rel_err", report.max_err_value_slope},
         {"tolerance", VerifyReport::kTolValueSlope},
         {"pass", report.value_slope_ok()}},
        {{"name", "fenchel_equality"},
         {"max_rel_err", report.max_err_fenchel},
         {"tolerance", VerifyReport::kTolFenchel},
         {"pass", report.fenchel_ok()}},
        {{"name", "v_slope_vs_g"},
         {"max_rel_err", report.max_err_v_slope},
         {"tolerance", VerifyReport::kTolVSlope},
         {"pass", report.v_slope_ok()}},
    };
    doc["all_pass"] = report.all_ok();
    write_json(out_path(ctx, "verify_report.json"), doc);

    log << "verify: " << (report.all_ok() ? "all checks passed" : "checks FAILED") << "\n";
    return report.all_ok() ? kOk : kHardFail;
}

int cmd_simulate(const RunConfig& cfg, const RunContext& ctx, std::ostream& log) {
    if (!cfg.simulate) throw config_error("config: this subcommand needs a 'simulate' block");
    const SimulateSpec& spec = *cfg.simulate;
    ensure_out_dir(ctx);
    const DualField field = build_field(cfg);

    SimulationResult result;
    try {
        result = simulate(field, spec.x0, spec.n_paths, spec.n_steps, spec.seed,
                          ctx.workers);
    } catch (const std::domain_error& e) {
        log << "simulate: " << e.what() << "\n";
        return kHardFail;
    }

    const std::size_t d = field.market().dim();
    CsvTable table;
    table.header = {"path_id", "t", "xi", "wealth", "lambda"};
    for (std::size_t i = 1; i <= d; ++i) table.header.push_back("pi_" + std::to_string(i));
    for (const PathGrid& path : result.paths) {
        for (std::size_t j = 0; j < path.times.size(); ++j) {
            std::vector<double> row = {double(path.path_index), path.times[j], path.xi[j],
                                       path.wealth[j], path.lambda_path[j]};
            for (std::size_t i = 0; i < d; ++i) {
                const bool has = j < path.portfolio.size() && path.portfolio[j].size() == d;
                row.push_back(has ? path.portfolio[j][i]
                                  : std::numeric_limits<double>::quiet_NaN());
            }
            table.rows.push_back(std::move(row));
        }
    }
    write_csv(out_path(ctx, "paths.csv"), table);

    // Budget-pricing check: mean of xi_t X*_t vs x0 at t = T/2 and t = T.
    json budget = json::array();
    const std::size_t n_times = result.paths.front().times.size();
    for (std::size_t j : {(n_times - 1) / 2, n_times - 1}) {
        double sum = 0.0, sum_sq = 0.0;
        std::size_t n = 0;
        for (const PathGrid& path : result.paths) {
            if (path.aborted && path.abort_index <= j) continue;
            const double v = path.xi[j] * path.wealth[j];
            sum += v;
            sum_sq += v * v;
            ++n;
        }
        const double mean = sum / double(n);
        const double var = (sum_sq - sum * sum / double(n)) / double(n - 1);
        const double se = std::sqrt(var / double(n));
        budget.push_back({{"t", result.paths.front().times[j]},
                          {"mean_xi_wealth", mean},
                          {"standard_error", se},
                          {"z_score", (mean - spec.x0) / se}});
    }

    std::size_t aborted = 0;
    for (const PathGrid& path : result.paths) aborted += path.aborted ? 1 : 0;

    json doc;
    doc["lambda0"] = result.lambda0;
    doc["homogeneity_max_rel_err"] = result.homogeneity_max_rel_err;
    doc["budget_martingale"] = budget;
    doc["aborted_paths"] = aborted;
    for (const PathGrid& path : result.paths) {
        if (path.aborted) continue;
        const EulerReport euler = euler_replication_check(field, path);
        json decay = json::array();
        for (std::size_t i = 0; i < euler.step_counts.size(); ++i)
            decay.push_back({{"steps", euler.step_counts[i]},
                             {"max_rel_err", euler.max_rel_err[i]}});
        doc["euler_decay"] = decay;
        break;
    }
    write_json(out_path(ctx, "summary.json"), doc);

    log << "simulate: " << result.paths.size() << " paths, lambda0 = " << result.lambda0
        << ", homogeneity max rel err = " << result.homogeneity_max_rel_err << "\n";
    return kOk;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Duality-based optimal portfolio engine"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    unsigned workers_flag = 0;
    bool workers_given = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_override, "output directory (overrides config)");
        sub->add_option("--workers", workers_flag, "worker threads (0 = all cores)")
            ->each([&](const std::string&) { workers_given = true; });
    };
    CLI::App* validate = app.add_subcommand("validate", "check config assumptions");
    CLI::App* grid = app.add_subcommand("grid", "emit value and multiplier surfaces");
    CLI::App* verify = app.add_subcommand("verify", "run the identity checks");
    CLI::App* simulate = app.add_subcommand("simulate", "simulate optimal paths");
    for (CLI::App* sub : {validate, grid, verify, simulate}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        const RunConfig cfg = load_config_file(config_path);

        RunContext ctx;
        ctx.out_dir = out_override.empty() ? cfg.output.directory : out_override;
        ctx.workers = cfg.workers;
        if (const char* env = std::getenv("DUALPORT_WORKERS"))
            ctx.workers = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        if (workers_given) ctx.workers = workers_flag;

        if (validate->parsed()) return cmd_validate(cfg, ctx, std::cout);
        if (grid->parsed()) return cmd_grid(cfg, ctx, std::cout);
        if (verify->parsed()) return cmd_verify(cfg, ctx, std::cout);
        if (simulate->parsed()) return cmd_simulate(cfg, ctx, std::cout);
        return kUsage;
    } catch (const config_error& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kHardFail;
    }
}

}  // namespace dualport::cli
