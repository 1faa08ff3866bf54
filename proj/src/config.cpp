#include "dualport/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace dualport {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw config_error("config: " + ctx + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw config_error("config: unknown key '" + it.key() + "' in " + ctx);
    }
}

double require_number(const json& obj, const std::string& ctx, const char* key) {
    if (!obj.contains(key))
        throw config_error("config: missing '" + std::string(key) + "' in " + ctx);
    if (!obj[key].is_number())
        throw config_error("config: '" + std::string(key) + "' in " + ctx + " must be a number");
    return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& ctx, const char* key,
                       double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw config_error("config: '" + std::string(key) + "' in " + ctx + " must be a number");
    return obj[key].get<double>();
}

Segment parse_segment(const json& j, std::size_t index) {
    std::ostringstream ctx;
    ctx << "utility.segments[" << index << "]";
    check_keys(j, ctx.str(), {"kind", "a", "b", "c", "p", "x_lo", "x_hi"});
    if (!j.contains("kind") || !j["kind"].is_string())
        throw config_error("config: " + ctx.str() + " needs a string 'kind'");

    Segment s;
    try {
        s.kind = segment_kind_from_string(j["kind"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }

    const auto forbid = [&](const char* key) {
        if (j.contains(key))
            throw config_error("config: " + ctx.str() + " ('" +
                               j["kind"].get<std::string>() + "') does not take '" + key + "'");
    };
    switch (s.kind) {
        case SegmentKind::constant:
            forbid("b");
            forbid("c");
            forbid("p");
            break;
        case SegmentKind::affine:
            forbid("c");
            forbid("p");
            break;
        case SegmentKind::log_shifted:
            forbid("p");
            break;
        case SegmentKind::power_shifted:
        case SegmentKind::exp_shifted:
            break;
    }

    s.a = optional_number(j, ctx.str(), "a", 0.0);
    s.b = optional_number(j, ctx.str(), "b", 1.0);
    s.c = optional_number(j, ctx.str(), "c", 0.0);
    if (s.kind == SegmentKind::power_shifted || s.kind == SegmentKind::exp_shifted)
        s.p = require_number(j, ctx.str(), "p");
    s.x_lo = require_number(j, ctx.str(), "x_lo");
    if (j.contains("x_hi")) {
        if (j["x_hi"].is_string()) {
            if (j["x_hi"].get<std::string>() != "inf")
                throw config_error("config: " + ctx.str() + ".x_hi must be a number or \"inf\"");
            s.x_hi = kInf;
        } else {
            s.x_hi = require_number(j, ctx.str(), "x_hi");
        }
    } else {
        s.x_hi = kInf;
    }
    return s;
}

}  // namespace

std::vector<double> GridSpec::x_values() const {
    std::vector<double> xs(static_cast<std::size_t>(x_count));
    for (int i = 0; i < x_count; ++i) {
        const double f = x_count == 1 ? 0.0 : i / double(x_count - 1);
        xs[i] = x_log_spacing ? x_min * std::pow(x_max / x_min, f)
                              : x_min + (x_max - x_min) * f;
    }
    return xs;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    check_keys(doc, "top level",
               {"market", "utility", "grid", "simulate", "output", "quadrature", "workers"});

    RunConfig cfg;

    if (!doc.contains("market")) throw config_error("config: missing 'market' block");
    {
        const json& m = doc["market"];
        check_keys(m, "market", {"r", "mu", "sigma", "T"});
        cfg.r = require_number(m, "market", "r");
        cfg.T = require_number(m, "market", "T");
        if (!m.contains("mu") || !m["mu"].is_array())
            throw config_error("config: market.mu must be an array");
        for (const auto& v : m["mu"]) cfg.mu.push_back(v.get<double>());
        if (!m.contains("sigma") || !m["sigma"].is_array())
            throw config_error("config: market.sigma must be a matrix");
        for (const auto& row : m["sigma"]) {
            if (!row.is_array()) throw config_error("config: market.sigma must be a matrix");
            cfg.sigma.emplace_back();
            for (const auto& v : row) cfg.sigma.back().push_back(v.get<double>());
        }
    }

    if (!doc.contains("utility")) throw config_error("config: missing 'utility' block");
    {
        const json& u = doc["utility"];
        check_keys(u, "utility", {"L", "domain_open", "segments", "breakpoint_values"});
        cfg.L = require_number(u, "utility", "L");
        if (u.contains("domain_open")) {
            if (!u["domain_open"].is_boolean())
                throw config_error("config: utility.domain_open must be a boolean");
            cfg.domain_open = u["domain_open"].get<bool>();
        }
        if (!u.contains("segments") || !u["segments"].is_array() || u["segments"].empty())
            throw config_error("config: utility.segments must be a non-empty array");
        std::size_t idx = 0;
        for (const auto& s : u["segments"]) cfg.segments.push_back(parse_segment(s, idx++));
        if (u.contains("breakpoint_values")) {
            if (!u["breakpoint_values"].is_array())
                throw config_error("config: utility.breakpoint_values must be an array");
            for (const auto& v : u["breakpoint_values"])
                cfg.breakpoint_values.push_back(v.get<double>());
        }
    }

    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        check_keys(g, "grid", {"t_values", "x_min", "x_max", "x_count", "x_spacing"});
        GridSpec spec;
        if (!g.contains("t_values") || !g["t_values"].is_array() || g["t_values"].empty())
            throw config_error("config: grid.t_values must be a non-empty array");
        for (const auto& v : g["t_values"]) spec.t_values.push_back(v.get<double>());
        spec.x_min = require_number(g, "grid", "x_min");
        spec.x_max = require_number(g, "grid", "x_max");
        spec.x_count = static_cast<int>(require_number(g, "grid", "x_count"));
        if (spec.x_count < 1) throw config_error("config: grid.x_count must be >= 1");
        if (!(spec.x_min <= spec.x_max))
            throw config_error("config: grid.x_min must not exceed grid.x_max");
        if (g.contains("x_spacing")) {
            const std::string sp = g["x_spacing"].get<std::string>();
            if (sp == "log")
                spec.x_log_spacing = true;
            else if (sp != "linear")
                throw config_error("config: grid.x_spacing must be 'linear' or 'log'");
            if (spec.x_log_spacing && !(spec.x_min > 0.0))
                throw config_error("config: log spacing needs x_min > 0");
        }
        cfg.grid = spec;
    }

    if (doc.contains("simulate")) {
        const json& s = doc["simulate"];
        check_keys(s, "simulate", {"x0", "n_paths", "n_steps", "seed"});
        SimulateSpec spec;
        spec.x0 = require_number(s, "simulate", "x0");
        spec.n_paths = static_cast<int>(require_number(s, "simulate", "n_paths"));
        spec.n_steps = static_cast<int>(require_number(s, "simulate", "n_steps"));
        spec.seed = static_cast<std::uint64_t>(optional_number(s, "simulate", "seed", 0.0));
        if (spec.n_paths < 1 || spec.n_steps < 1)
            throw config_error("config: simulate.n_paths and n_steps must be >= 1");
        cfg.simulate = spec;
    }

    if (doc.contains("output")) {
        const json& o = doc["output"];
        check_keys(o, "output", {"directory", "formats"});
        if (o.contains("directory")) cfg.output.directory = o["directory"].get<std::string>();
        if (o.contains("formats")) {
            cfg.output.csv = false;
            for (const auto& f : o["formats"]) {
                const std::string name = f.get<std::string>();
                if (name == "csv")
                    cfg.output.csv = true;
                else if (name == "svg")
                    cfg.output.svg = true;
                else
                    throw config_error("config: unknown output format '" + name + "'");
            }
        }
    }

    if (doc.contains("quadrature")) {
        const json& q = doc["quadrature"];
        check_keys(q, "quadrature", {"rel_tol"});
        cfg.quadrature.rel_tol = optional_number(q, "quadrature", "rel_tol", 1e-11);
        if (!(cfg.quadrature.rel_tol > 0.0))
            throw config_error("config: quadrature.rel_tol must be positive");
    }

    if (doc.contains("workers")) {
        if (!doc["workers"].is_number_integer() || doc["workers"].get<int>() < 0)
            throw config_error("config: workers must be a non-negative integer");
        cfg.workers = doc["workers"].get<unsigned>();
    }

    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace dualport
