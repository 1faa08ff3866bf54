#include "dualport/example_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "dualport/detail/normal.hpp"

namespace dualport::example_oracle {

namespace {

void check(const ExampleParams& p, double t, double y) {
    if (!(t >= 0.0) || !(t < p.T)) throw std::domain_error("oracle: need 0 <= t < T");
    if (!(y > 0.0)) throw std::domain_error("oracle: y must be positive");
}

}  // namespace

double oracle_d(const ExampleParams& p, double t, double y) {
    check(p, t, y);
    const double s = p.theta() * std::sqrt(p.T - t);
    return -(std::log(1.0 / y) + p.drift() * (p.T - t)) / s;
}

double oracle_g(const ExampleParams& p, double t, double y) {
    const double d = oracle_d(p, t, y);
    return detail::norm_cdf_bar(d) / y;
}

double oracle_g_prime(const ExampleParams& p, double t, double y) {
    const double d = oracle_d(p, t, y);
    const double s = p.theta() * std::sqrt(p.T - t);
    return -(detail::norm_cdf_bar(d) + detail::norm_pdf(d) / s) / (y * y);
}

double oracle_v(const ExampleParams& p, double t, double y) {
    const double d = oracle_d(p, t, y);
    const double s = p.theta() * std::sqrt(p.T - t);
    return detail::norm_cdf_bar(d) * (std::log(1.0 / y) + p.drift() * (p.T - t)) +
           s * detail::norm_pdf(d);
}

double oracle_v_prime(const ExampleParams& p, double t, double y) {
    const double d = oracle_d(p, t, y);
    return -detail::norm_cdf_bar(d) / y;
}

double oracle_multiplier(const ExampleParams& p, double t, double x) {
    if (!(x > 0.0)) throw std::domain_error("oracle: x must be positive");
    // g(t, .) is strictly decreasing onto (0, inf); plain bisection.
    double lo = 1.0, hi = 1.0;
    while (oracle_g(p, t, lo) < x) lo *= 0.5;
    while (oracle_g(p, t, hi) > x) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo) || !(mid < hi)) break;
        (oracle_g(p, t, mid) > x ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double oracle_u(const ExampleParams& p, double t, double x) {
    const double y = oracle_multiplier(p, t, x);
    const double d = oracle_d(p, t, y);
    const double s = p.theta() * std::sqrt(p.T - t);
    return detail::norm_cdf_bar(d) *
               (1.0 - std::log(y) + p.drift() * (p.T - t)) +
           s * detail::norm_pdf(d);
}

}  // namespace dualport::example_oracle
