#include "dualport/market.hpp"

#include <cmath>
#include <stdexcept>

#include "dualport/detail/normal.hpp"
#include "dualport/detail/parallel.hpp"
#include "dualport/detail/philox.hpp"

namespace dualport {

namespace {

// LU factorisation with partial pivoting for the small d x d systems here.
std::vector<double> lu_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::fabs(a[row][col]) > std::fabs(a[piv][col])) piv = row;
        if (std::fabs(a[piv][col]) < 1e-14)
            throw std::invalid_argument("market: sigma is singular");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

// Smallest eigenvalue of the symmetric matrix sigma sigma^T via cyclic
// Jacobi rotations; d stays in the single digits.
double min_eigenvalue_sst(const std::vector<std::vector<double>>& sigma) {
    const std::size_t n = sigma.size();
    std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) s[i][j] += sigma[i][k] * sigma[j][k];
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += s[i][j] * s[i][j];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(s[p][q]) < 1e-18) continue;
                const double phi = 0.5 * std::atan2(2.0 * s[p][q], s[q][q] - s[p][p]);
                const double c = std::cos(phi), t = std::sin(phi);
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s[p][k], sqk = s[q][k];
                    s[p][k] = c * spk - t * sqk;
                    s[q][k] = t * spk + c * sqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s[k][p], skq = s[k][q];
                    s[k][p] = c * skp - t * skq;
                    s[k][q] = t * skp + c * skq;
                }
            }
    }
    double mn = s[0][0];
    for (std::size_t i = 1; i < n; ++i) mn = std::fmin(mn, s[i][i]);
    return mn;
}

}  // namespace

MarketModel::MarketModel(double r, std::vector<double> mu,
                         std::vector<std::vector<double>> sigma, double T)
    : r_(r), T_(T), mu_(std::move(mu)), sigma_(std::move(sigma)) {
    const std::size_t d = mu_.size();
    if (d < 1) throw std::invalid_argument("market: need at least one risky asset");
    if (!(T_ > 0.0) || !std::isfinite(T_))
        throw std::invalid_argument("market: horizon T must be positive");
    if (!std::isfinite(r_)) throw std::invalid_argument("market: non-finite rate");
    if (sigma_.size() != d)
        throw std::invalid_argument("market: sigma must be d x d");
    for (const auto& row : sigma_)
        if (row.size() != d) throw std::invalid_argument("market: sigma must be d x d");

    if (min_eigenvalue_sst(sigma_) < 1e-10)
        throw std::invalid_argument("market: sigma sigma^T is not positive definite");

    std::vector<double> excess(d);
    for (std::size_t i = 0; i < d; ++i) excess[i] = mu_[i] - r_;
    theta_ = lu_solve(sigma_, excess);
    double norm2 = 0.0;
    for (double v : theta_) norm2 += v * v;
    theta_norm_ = std::sqrt(norm2);
    if (theta_norm_ < 1e-10)
        throw std::invalid_argument(
            "market: zero market price of risk (mu = r); the kernel degenerates");
}

void MarketModel::check_time(double t) const {
    if (!(t >= 0.0) || !(t < T_))
        throw std::domain_error("market: need 0 <= t < T");
}

double MarketModel::d_hat(double t, double z) const {
    check_time(t);
    const double s = theta_norm_ * std::sqrt(T_ - t);
    return -(std::log(z) + kernel_drift() * (T_ - t)) / s;
}

double MarketModel::z_cdf(double t, double z) const {
    check_time(t);
    if (z <= 0.0) return 0.0;
    return detail::norm_cdf_bar(d_hat(t, z));
}

double MarketModel::z_pdf(double t, double z) const {
    check_time(t);
    if (z <= 0.0) return 0.0;
    const double s = theta_norm_ * std::sqrt(T_ - t);
    return detail::norm_pdf(d_hat(t, z)) / (z * s);
}

double MarketModel::kernel_mean(double t, double s) const {
    if (!(0.0 <= t) || !(t <= s) || !(s <= T_))
        throw std::domain_error("market: need 0 <= t <= s <= T");
    return std::exp(-r_ * (s - t));
}

std::vector<double> MarketModel::solve_sigma(const std::vector<double>& rhs) const {
    return lu_solve(sigma_, rhs);
}

std::vector<KernelPath> sample_kernel_paths(const MarketModel& m,
                                            const std::vector<double>& times,
                                            int n_paths, std::uint64_t seed,
                                            unsigned workers) {
    if (n_paths <= 0) throw std::invalid_argument("sample_kernel_paths: n_paths <= 0");
    if (times.empty()) throw std::invalid_argument("sample_kernel_paths: empty grid");
    if (times.front() != 0.0)
        throw std::invalid_argument("sample_kernel_paths: grid must start at 0");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (!(times[k] < times[k + 1]))
            throw std::invalid_argument("sample_kernel_paths: grid must be increasing");
    if (times.back() > m.T() + 1e-12)
        throw std::invalid_argument("sample_kernel_paths: grid exceeds the horizon");

    const std::size_t d = m.dim();
    const std::size_t steps = times.size() - 1;
    std::vector<KernelPath> out(static_cast<std::size_t>(n_paths));

    detail::parallel_for(
        out.size(),
        [&](std::size_t p) {
            KernelPath& path = out[p];
            path.seed = seed;
            path.path_index = p;
            path.times = times;
            path.xi.assign(times.size(), 1.0);
            path.brownian_increments.assign(steps, std::vector<double>(d, 0.0));
            const detail::CounterNormal normal(seed, p);
            double log_xi = 0.0;
            std::uint64_t draw = 0;
            for (std::size_t k = 0; k < steps; ++k) {
                const double dt = times[k + 1] - times[k];
                const double sq = std::sqrt(dt);
                double theta_dw = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double dw = sq * normal(draw++);
                    path.brownian_increments[k][i] = dw;
                    theta_dw += m.theta()[i] * dw;
                }
                log_xi += -m.kernel_drift() * dt - theta_dw;
                path.xi[k + 1] = std::exp(log_xi);
            }
        },
        workers);
    return out;
}

}  // namespace dualport
