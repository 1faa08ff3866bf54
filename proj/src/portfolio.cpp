#include "dualport/portfolio.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualport/detail/parallel.hpp"

namespace dualport {

namespace {

std::vector<double> policy_from_multiplier(const DualField& f, double t, double lam) {
    const MarketModel& m = f.market();
    std::vector<double> pi = m.solve_sigma(m.theta());
    const double scale = -lam * f.g_prime(t, lam);
    for (double& v : pi) v *= scale;
    return pi;
}

}  // namespace

double terminal_wealth(const DualField& f, double xi_T, double lambda0) {
    if (!(xi_T > 0.0) || !(lambda0 > 0.0))
        throw std::domain_error("terminal_wealth: xi_T and lambda0 must be positive");
    return f.bundle().point_I(lambda0 * xi_T);
}

double optimal_wealth(const DualField& f, double t, double xi_t, double lambda0) {
    if (!(xi_t > 0.0) || !(lambda0 > 0.0))
        throw std::domain_error("optimal_wealth: xi_t and lambda0 must be positive");
    if (!(t >= 0.0) || !(t < f.market().T()))
        throw std::domain_error("optimal_wealth: need 0 <= t < T");
    return f.g(t, lambda0 * xi_t);
}

std::vector<double> feedback_policy(const DualField& f, double t, double x) {
    return policy_from_multiplier(f, t, f.multiplier_Y(t, x));
}

SimulationResult simulate(const DualField& f, double x0, int n_paths, int n_steps,
                          std::uint64_t seed, unsigned workers,
                          const SimulateOptions& options) {
    if (n_paths <= 0 || n_steps <= 0)
        throw std::invalid_argument("simulate: n_paths and n_steps must be positive");
    if (!std::isfinite(x0) || !(x0 > f.domain().L_hat))
        throw std::domain_error("simulate: x0 must lie in (L_hat, inf)");

    const MarketModel& m = f.market();
    const double T = m.T();
    std::vector<double> times(static_cast<std::size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) times[k] = T * k / double(n_steps);
    times.back() = T;

    SimulationResult result;
    result.lambda0 = f.multiplier_Y(0.0, x0);
    const double lambda0 = result.lambda0;

    std::vector<KernelPath> kernels = sample_kernel_paths(m, times, n_paths, seed, workers);
    result.paths.resize(kernels.size());

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double abort_tol =
        1e-10 * std::fmax(1.0, std::fabs(f.domain().L_hat));

    detail::parallel_for(
        kernels.size(),
        [&](std::size_t p) {
            const KernelPath& k = kernels[p];
            PathGrid path;
            path.times = k.times;
            path.xi = k.xi;
            path.brownian_increments = k.brownian_increments;
            path.seed = k.seed;
            path.path_index = k.path_index;
            path.lambda0 = lambda0;
            const std::size_t n = path.times.size();
            path.wealth.assign(n, nan);
            path.lambda_path.assign(n, nan);
            path.lambda_check.assign(n, nan);
            path.portfolio.assign(n - 1, {});

            for (std::size_t j = 0; j < n; ++j) {
                const double t = path.times[j];
                const double lam = lambda0 * path.xi[j];
                path.lambda_path[j] = lam;
                const bool terminal = (j + 1 == n);
                const double x = terminal ? f.bundle().point_I(lam) : f.g(t, lam);
                path.wealth[j] = x;
                if (terminal) break;
                if (!(x > f.domain().L_hat + abort_tol)) {
                    path.aborted = true;
                    path.abort_index = j;
                    break;
                }
                try {
                    if (options.check_multiplier)
                        path.lambda_check[j] = f.multiplier_Y(t, x);
                    if (options.fill_portfolio)
                        path.portfolio[j] = policy_from_multiplier(
                            f, t,
                            options.check_multiplier ? path.lambda_check[j] : lam);
                } catch (const std::range_error&) {
                    path.aborted = true;
                    path.abort_index = j;
                    break;
                }
            }
            result.paths[p] = std::move(path);
        },
        workers);

    if (options.check_multiplier) {
        double worst = 0.0;
        for (const PathGrid& path : result.paths) {
            const std::size_t limit =
                path.aborted ? path.abort_index : path.times.size() - 1;
            for (std::size_t j = 0; j < limit; ++j) {
                if (std::isnan(path.lambda_check[j])) continue;
                worst = std::fmax(worst,
                                  std::fabs(path.lambda_check[j] - path.lambda_path[j]) /
                                      path.lambda_path[j]);
            }
        }
        result.homogeneity_max_rel_err = worst;
    } else {
        result.homogeneity_max_rel_err = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

EulerReport euler_replication_check(const DualField& f, const PathGrid& path) {
    if (path.brownian_increments.empty())
        throw std::invalid_argument("euler_replication_check: path carries no increments");

    const MarketModel& m = f.market();
    const std::size_t d = m.dim();
    const std::size_t n = path.times.size() - 1;
    const double x0 = path.wealth.front();

    EulerReport report;
    std::vector<std::size_t> strides;
    for (std::size_t s = 8; s >= 1; s /= 2)
        if (n % s == 0 && n / s >= 2) strides.push_back(s);

    for (std::size_t stride : strides) {
        double x = x0;
        double worst = 0.0;
        bool alive = true;
        for (std::size_t j = 0; j < n; j += stride) {
            const double t = path.times[j];
            const double dt = path.times[j + stride] - path.times[j];
            std::vector<double> dw(d, 0.0);
            for (std::size_t k = j; k < j + stride; ++k)
                for (std::size_t i = 0; i < d; ++i)
                    dw[i] += path.brownian_increments[k][i];

            std::vector<double> pi(d, 0.0);
            if (alive && x > f.domain().L_hat) {
                try {
                    pi = feedback_policy(f, t, x);
                } catch (const std::exception&) {
                    alive = false;
                }
            } else {
                alive = false;
            }

            double pi_sum = 0.0, drift_risky = 0.0, noise = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                pi_sum += pi[i];
                drift_risky += pi[i] * m.mu()[i];
                double row = 0.0;
                for (std::size_t c = 0; c < d; ++c) row += m.sigma()[i][c] * dw[c];
                noise += pi[i] * row;
            }
            x += (m.r() * (x - pi_sum) + drift_risky) * dt + noise;
            worst = std::fmax(worst, std::fabs(x - path.wealth[j + stride]) / x0);
        }
        report.step_counts.push_back(static_cast<int>(n / stride));
        report.max_rel_err.push_back(worst);
        report.terminal_rel_err.push_back(std::fabs(x - path.wealth.back()) / x0);
    }
    return report;
}

}  // namespace dualport
