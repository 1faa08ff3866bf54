#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualport/market.hpp"
#include "dualport/piecewise_utility.hpp"
#include "dualport/quadrature.hpp"

namespace dualport {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    std::vector<double> t_values;
    double x_min = 0.0;
    double x_max = 0.0;
    int x_count = 0;
    bool x_log_spacing = false;

    std::vector<double> x_values() const;
};

struct SimulateSpec {
    double x0 = 0.0;
    int n_paths = 0;
    int n_steps = 0;
    std::uint64_t seed = 0;
};

struct OutputSpec {
    std::string directory = "out";
    bool csv = true;
    bool svg = false;
};

/// One JSON document drives every subcommand.  Unknown keys anywhere in the
/// document are rejected.
struct RunConfig {
    // market block
    double r = 0.0;
    std::vector<double> mu;
    std::vector<std::vector<double>> sigma;
    double T = 0.0;

    // utility block
    double L = 0.0;
    bool domain_open = false;
    std::vector<Segment> segments;
    std::vector<double> breakpoint_values;

    std::optional<GridSpec> grid;
    std::optional<SimulateSpec> simulate;
    OutputSpec output;
    QuadratureConfig quadrature;
    unsigned workers = 0;

    MarketModel make_market() const { return MarketModel(r, mu, sigma, T); }
    PiecewiseUtility make_utility() const {
        return PiecewiseUtility(L, domain_open, segments, breakpoint_values);
    }
};

/// Parses a config document; throws config_error on structural problems
/// (unknown keys, wrong types, missing required fields).
RunConfig parse_config(const std::string& json_text);

/// Reads and parses a config file; throws config_error on I/O failure.
RunConfig load_config_file(const std::string& path);

}  // namespace dualport
