#include "dualport/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "dualport/detail/gauss_legendre.hpp"
#include "dualport/detail/normal.hpp"

namespace dualport {

namespace {

constexpr double kBaseWindow = 10.0;

struct Transform {
    double drift;  // (r + |theta|^2 / 2) * tau
    double vol;    // |theta| * sqrt(tau)
    double z(double n) const { return std::exp(-drift - vol * n); }
};

}  // namespace

double expect(const MarketModel& m, const EnvelopeBundle& b,
              const ExpectationRequest& req, const QuadratureConfig& cfg) {
    if (!(req.y > 0.0) || !std::isfinite(req.y))
        throw std::domain_error("expect: y must be positive");
    if (!(req.t >= 0.0) || !(req.t < m.T()))
        throw std::domain_error("expect: need 0 <= t < T");

    const double tau = m.T() - req.t;
    const Transform tr{m.kernel_drift() * tau, m.theta_norm() * std::sqrt(tau)};

    // Preimages of the conjugate switch points: y * z(n) = a  =>
    // n = (log(y / a) - drift) / vol.
    std::vector<double> splits;
    double lo = -kBaseWindow, hi = kBaseWindow;
    for (double a : req.critical_y) {
        if (!(a > 0.0) || !std::isfinite(a)) continue;
        const double n = (std::log(req.y / a) - tr.drift) / tr.vol;
        if (!std::isfinite(n)) continue;
        lo = std::fmin(lo, n - kBaseWindow);
        hi = std::fmax(hi, n + kBaseWindow);
        splits.push_back(n);
    }
    std::sort(splits.begin(), splits.end());
    std::vector<double> bounds;
    bounds.push_back(lo);
    for (double n : splits)
        if (n > bounds.back() + 1e-13 && n < hi - 1e-13) bounds.push_back(n);
    bounds.push_back(hi);

    const auto point = [&](double n) -> double {
        const double z = tr.z(n);
        const double arg = req.y * z;
        double h;
        switch (req.integrand) {
            case Integrand::one: h = 1.0; break;
            case Integrand::I: h = b.point_I(arg); break;
            case Integrand::V: h = b.conjugate_V(arg); break;
            case Integrand::UstarstarI:
                h = b.envelope_at_conjugate_point(arg);
                break;
            case Integrand::IctnPrime: h = b.Ictn_prime(arg); break;
            default: h = 0.0;
        }
        if (h == 0.0) return 0.0;
        double w = 1.0;
        if (req.weight == Weight::z) w = z;
        if (req.weight == Weight::z_squared) w = z * z;
        return w * h * detail::norm_pdf(n);
    };

    const auto& rule = detail::gauss_legendre(cfg.order);
    const auto level_sum = [&](int level) -> double {
        const std::size_t pieces = std::size_t{1} << level;
        double total = 0.0;
        for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
            const double width = (bounds[j + 1] - bounds[j]) / double(pieces);
            double panel_total = 0.0;
            for (std::size_t i = 0; i < pieces; ++i) {
                const double a = bounds[j] + width * double(i);
                const double mid = a + 0.5 * width;
                const double half = 0.5 * width;
                double acc = 0.0;
                for (int q = 0; q < cfg.order; ++q)
                    acc += rule.weights[q] * point(mid + half * rule.nodes[q]);
                panel_total += acc * half;
            }
            total += panel_total;
        }
        return total;
    };

    // Convergence is judged purely relative so integrals of any magnitude
    // (the far tail included) keep rel_tol significant digits.
    double prev = level_sum(0);
    double gap = std::fabs(prev);
    for (int level = 1; level <= cfg.max_levels; ++level) {
        const double cur = level_sum(level);
        gap = std::fabs(cur - prev);
        prev = cur;
        if (gap <= cfg.rel_tol * std::fabs(cur)) return cur;
    }
    throw accuracy_error("expect: panel refinement did not converge", prev, gap);
}

}  // namespace dualport
