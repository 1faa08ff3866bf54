#pragma once

#include <cstdint>
#include <vector>

namespace dualport {

/// Constant-coefficient Black-Scholes market: riskless rate r, drift vector
/// mu, volatility matrix sigma (d x d, rows = assets), horizon T.  Derives
/// the market price of risk theta = sigma^{-1} (mu - r 1) and rejects
/// singular volatility or a vanishing theta (the pricing kernel would
/// degenerate and the budget map would not be invertible).
class MarketModel {
public:
    MarketModel(double r, std::vector<double> mu,
                std::vector<std::vector<double>> sigma, double T);

    double r() const { return r_; }
    double T() const { return T_; }
    std::size_t dim() const { return mu_.size(); }
    const std::vector<double>& mu() const { return mu_; }
    const std::vector<std::vector<double>>& sigma() const { return sigma_; }
    const std::vector<double>& theta() const { return theta_; }
    double theta_norm() const { return theta_norm_; }

    /// Drift rate of -log xi: r + |theta|^2 / 2.
    double kernel_drift() const { return r_ + 0.5 * theta_norm_ * theta_norm_; }

    /// P(Z_{t,T} <= z) for the kernel ratio Z_{t,T} = xi_T / xi_t.
    double z_cdf(double t, double z) const;
    /// Density of Z_{t,T}; zero for z <= 0.
    double z_pdf(double t, double z) const;
    /// -(log z + (r + |theta|^2/2)(T-t)) / (|theta| sqrt(T-t)).
    double d_hat(double t, double z) const;

    /// E[Z_{t,s}] = exp(-r (s - t)) for 0 <= t <= s <= T.
    double kernel_mean(double t, double s) const;

    /// Solves sigma * x = rhs (LU with partial pivoting; d is small).
    std::vector<double> solve_sigma(const std::vector<double>& rhs) const;

private:
    void check_time(double t) const;

    double r_;
    double T_;
    std::vector<double> mu_;
    std::vector<std::vector<double>> sigma_;
    std::vector<double> theta_;
    double theta_norm_;
};

/// One simulated pricing-kernel trajectory.  xi is sampled exactly from its
/// lognormal law (no discretisation bias); the Gaussian increments are
/// retained so wealth-SDE integrations can reuse the same noise.
struct KernelPath {
    std::vector<double> times;
    std::vector<double> xi;
    /// increments[k][i] = component i of W_{t_{k+1}} - W_{t_k}.
    std::vector<std::vector<double>> brownian_increments;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

/// Exact lognormal sampling of xi on the given grid, one counter-based
/// stream per path index: results do not depend on the worker count.
std::vector<KernelPath> sample_kernel_paths(const MarketModel& m,
                                            const std::vector<double>& times,
                                            int n_paths, std::uint64_t seed,
                                            unsigned workers = 0);

}  // namespace dualport
