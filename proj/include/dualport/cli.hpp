#pragma once

#include <ostream>
#include <string>

#include "dualport/config.hpp"

namespace dualport::cli {

inline constexpr int kOk = 0;
inline constexpr int kHardFail = 1;
inline constexpr int kWarnings = 2;
inline constexpr int kUsage = 64;

struct RunContext {
    std::string out_dir;   // resolved output directory
    unsigned workers = 0;  // 0 = all cores
};

/// Assumption and invariant report; exit 0 all pass, 2 warnings, 1 failure.
int cmd_validate(const RunConfig& cfg, const RunContext& ctx, std::ostream& log);

/// Emits u_surface.csv / lambda_surface.csv (plus SVG families on request)
/// over the configured (t, x) grid; exit 1 when the grid leaves the domain.
int cmd_grid(const RunConfig& cfg, const RunContext& ctx, std::ostream& log);

/// Runs the four-identity verification over the grid; exit 0 pass, 1 fail.
int cmd_verify(const RunConfig& cfg, const RunContext& ctx, std::ostream& log);

/// Simulates optimal paths; emits paths.csv and summary.json.
int cmd_simulate(const RunConfig& cfg, const RunContext& ctx, std::ostream& log);

/// Full argv entry point (subcommand dispatch, --config/--out/--workers,
/// DUALPORT_WORKERS env override).
int run(int argc, const char* const* argv);

}  // namespace dualport::cli
