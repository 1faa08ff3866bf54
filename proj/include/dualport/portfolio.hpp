#pragma once

#include <cstdint>
#include <vector>

#include "dualport/dual_field.hpp"

namespace dualport {

/// One simulated optimal trajectory: kernel, wealth, multiplier and policy.
/// lambda_path carries the homogeneity shortcut lambda0 * xi_t; lambda_check
/// carries the independent root-find multiplier(t, X*_t) for every t < T
/// (NaN after an abort).  Their agreement is the homogeneity theorem.
struct PathGrid {
    std::vector<double> times;
    std::vector<double> xi;
    std::vector<double> wealth;
    std::vector<double> lambda_path;
    std::vector<double> lambda_check;
    std::vector<std::vector<double>> portfolio;  // one vector per step time t < T
    std::vector<std::vector<double>> brownian_increments;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    double lambda0 = 0.0;
    bool aborted = false;
    std::size_t abort_index = 0;
};

struct SimulationResult {
    double lambda0 = 0.0;
    std::vector<PathGrid> paths;
    /// max over paths and times t < T of |lambda_check - lambda_path| / lambda_path
    double homogeneity_max_rel_err = 0.0;
};

struct SimulateOptions {
    /// Root-find multiplier(t, X*_t) at every step (the homogeneity check).
    bool check_multiplier = true;
    /// Evaluate the feedback policy at every step.
    bool fill_portfolio = true;
};

struct EulerReport {
    std::vector<int> step_counts;         // ascending
    std::vector<double> max_rel_err;      // max_t |X_euler - X*_t| / x0 per count
    std::vector<double> terminal_rel_err; // |X_euler(T) - X*_T| / x0 per count
};

/// X*_T = I(lambda0 * xi_T); never lies strictly inside a chord interval.
double terminal_wealth(const DualField& f, double xi_T, double lambda0);

/// X*_t = g(t, lambda0 * xi_t) for t < T.
double optimal_wealth(const DualField& f, double t, double xi_t, double lambda0);

/// Feedback allocation Pi(t, x) = -sigma^{-1} theta * lambda(t,x) *
/// dg/dy(t, lambda(t,x)); dollar amounts per risky asset.
std::vector<double> feedback_policy(const DualField& f, double t, double x);

/// Simulates n_paths optimal trajectories on a uniform n_steps grid.
/// By default the multiplier along each path is filled twice: via the
/// homogeneity shortcut and via an independent root-find; the simulation
/// exists to compare the two, so neither substitutes for the other.  Large
/// pricing-only batches can switch the per-step root-find off through the
/// options (homogeneity_max_rel_err is NaN then).
SimulationResult simulate(const DualField& f, double x0, int n_paths, int n_steps,
                          std::uint64_t seed, unsigned workers = 0,
                          const SimulateOptions& options = {});

/// Integrates the wealth SDE forward with the Euler scheme on coarsenings of
/// the stored Brownian increments (same noise, coarser clock) and reports
/// the deviation from the exact trajectory per step count.
EulerReport euler_replication_check(const DualField& f, const PathGrid& path);

}  // namespace dualport
