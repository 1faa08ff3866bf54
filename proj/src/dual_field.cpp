#include "dualport/dual_field.hpp"

#include <cmath>
#include <sstream>

#include "dualport/detail/brent.hpp"
#include "dualport/detail/parallel.hpp"

namespace dualport {

namespace {

double rel_err(double got, double ref) {
    const double denom = std::fabs(ref);
    if (denom == 0.0) return std::fabs(got) == 0.0 ? 0.0 : kInf;
    return std::fabs(got - ref) / denom;
}

// Unique root of a strictly decreasing h with h(root) = 0, bracketed by
// geometric expansion from y = 1.
template <class H>
double decreasing_root(H&& h, double factor, int max_expansions, double rel_tol,
                       const char* who) {
    double y_lo = 1.0, y_hi = 1.0;
    double f_lo = h(1.0), f_hi = f_lo;
    if (f_lo == 0.0) return 1.0;
    int n = 0;
    if (f_lo > 0.0) {  // root lies above
        do {
            y_lo = y_hi;
            f_lo = f_hi;
            y_hi *= factor;
            f_hi = h(y_hi);
            if (++n > max_expansions) {
                std::ostringstream os;
                os << who << ": no bracket after " << max_expansions
                   << " expansions (target outside the range)";
                throw std::range_error(os.str());
            }
        } while (f_hi > 0.0);
    } else {  // root lies below
        do {
            y_hi = y_lo;
            f_hi = f_lo;
            y_lo /= factor;
            f_lo = h(y_lo);
            if (++n > max_expansions) {
                std::ostringstream os;
                os << who << ": no bracket after " << max_expansions
                   << " expansions (target outside the range)";
                throw std::range_error(os.str());
            }
        } while (f_lo < 0.0);
    }
    return detail::brent(h, y_lo, y_hi, f_lo, f_hi, rel_tol);
}

}  // namespace

DualField::DualField(MarketModel market, EnvelopeBundle bundle, QuadratureConfig quad)
    : market_(std::move(market)), bundle_(std::move(bundle)), quad_(quad) {
    const double L = bundle_.source().L();
    domain_.L_hat = std::fmax(L * std::exp(-market_.r() * market_.T()), L);
    domain_.D_I_upper0 = multiplier_upper_limit(0.0);
}

void DualField::check_wealth(double x) const {
    if (!std::isfinite(x) || !(x > domain_.L_hat))
        throw std::domain_error("dual_field: wealth must lie in (L_hat, inf)");
}

double DualField::expect_req(double t, double y, Weight w, Integrand h) const {
    ExpectationRequest req;
    req.t = t;
    req.y = y;
    req.weight = w;
    req.integrand = h;
    req.critical_y = bundle_.switch_ys();
    return expect(market_, bundle_, req, quad_);
}

double DualField::g(double t, double y) const {
    if (t == market_.T()) return bundle_.point_I(y);
    return expect_req(t, y, Weight::z, Integrand::I);
}

double DualField::g_prime(double t, double y) const {
    if (!(y > 0.0)) throw std::domain_error("g_prime: y must be positive");
    const double smooth = expect_req(t, y, Weight::z_squared, Integrand::IctnPrime);
    double dirac = 0.0;
    for (const JumpPoint& j : bundle_.jump_set()) {
        const double a = j.y;
        dirac += (j.I_right - j.I_left) * (a * a) / (y * y * y) * market_.z_pdf(t, a / y);
    }
    return smooth + dirac;
}

double DualField::multiplier_Y(double t, double x) const {
    check_wealth(x);
    if (t == market_.T()) return bundle_.lambda_T(x);
    if (!(t >= 0.0) || !(t < market_.T()))
        throw std::domain_error("multiplier_Y: need 0 <= t <= T");
    return decreasing_root([&](double y) { return g(t, y) - x; }, bracket_factor_,
                           max_expansions_, root_rel_tol_, "multiplier_Y");
}

double DualField::conjugate_v(double t, double y) const {
    if (!(y > 0.0) || !std::isfinite(y))
        throw std::domain_error("conjugate_v: y must be positive");
    if (t == market_.T()) return bundle_.conjugate_V(y);
    const double upper = multiplier_upper_limit(t);
    if (!(y < upper))
        throw std::domain_error("conjugate_v: y outside the multiplier range");
    return expect_req(t, y, Weight::one, Integrand::V);
}

double DualField::value_u(double t, double x) const {
    check_wealth(x);
    if (!(t >= 0.0) || !(t < market_.T()))
        throw std::domain_error("value_u: need 0 <= t < T");
    const double y = multiplier_Y(t, x);
    const double direct = expect_req(t, y, Weight::one, Integrand::UstarstarI);
    const double fenchel = conjugate_v(t, y) + x * y;
    if (rel_err(direct, fenchel) > 1e-7) {
        std::ostringstream os;
        os << "value_u: quadrature route " << direct << " and Fenchel route " << fenchel
           << " disagree beyond 1e-7";
        throw std::runtime_error(os.str());
    }
    return direct;
}

double DualField::lambda(double t, double x) const { return multiplier_Y(t, x); }

double DualField::v_slope_fd(double t, double y) const {
    // v varies on the y-scale theta*sqrt(T-t); shrink the stencil near
    // maturity so the truncation error stays below the check tolerances.
    const double width = market_.theta_norm() * std::sqrt(market_.T() - t);
    const double h = y * std::fmin(2e-3, width / 60.0);
    const double f1 = conjugate_v(t, y + h), f_1 = conjugate_v(t, y - h);
    const double f2 = conjugate_v(t, y + 2.0 * h), f_2 = conjugate_v(t, y - 2.0 * h);
    return (-f2 + 8.0 * f1 - 8.0 * f_1 + f_2) / (12.0 * h);
}

double DualField::lambda_via_conjugate(double t, double x) const {
    check_wealth(x);
    if (t == market_.T()) return bundle_.lambda_T(x);
    return decreasing_root([&](double y) { return -v_slope_fd(t, y) - x; },
                           bracket_factor_, max_expansions_, root_rel_tol_,
                           "lambda_via_conjugate");
}

double DualField::multiplier_upper_limit(double t) const {
    const double L = bundle_.source().L();
    const double tail = L * std::exp(-market_.r() * (market_.T() - t));
    // The budget map descends to tail as y grows; a finite upper limit
    // exists only when tail sits strictly below L_hat.
    if (!(tail < domain_.L_hat - 1e-14 * std::fmax(1.0, std::fabs(domain_.L_hat))))
        return kInf;
    return decreasing_root([&](double y) { return g(t, y) - domain_.L_hat; },
                           bracket_factor_, max_expansions_, root_rel_tol_,
                           "multiplier_upper_limit");
}

VerifyReport DualField::verify_identities(const std::vector<double>& t_grid,
                                          const std::vector<double>& x_grid,
                                          unsigned workers) const {
    VerifyReport report;
    report.rows.resize(t_grid.size() * x_grid.size());
    detail::parallel_for(
        report.rows.size(),
        [&](std::size_t idx) {
            const double t = t_grid[idx / x_grid.size()];
            const double x = x_grid[idx % x_grid.size()];
            VerifyRow row{};
            row.t = t;
            row.x = x;
            const double y = multiplier_Y(t, x);
            row.y = y;

            row.err_multiplier = rel_err(lambda_via_conjugate(t, x), y);

            const double hx = 1e-4 * std::fabs(x);
            const double du =
                (value_u(t, x + hx) - value_u(t, x - hx)) / (2.0 * hx);
            row.err_value_slope = rel_err(du, y);

            const double u = value_u(t, x);
            row.err_fenchel = rel_err(u, conjugate_v(t, y) + x * y);

            row.err_v_slope = rel_err(v_slope_fd(t, y), -g(t, y));
            report.rows[idx] = row;
        },
        workers);

    for (const VerifyRow& r : report.rows) {
        report.max_err_multiplier = std::fmax(report.max_err_multiplier, r.err_multiplier);
        report.max_err_value_slope =
            std::fmax(report.max_err_value_slope, r.err_value_slope);
        report.max_err_fenchel = std::fmax(report.max_err_fenchel, r.err_fenchel);
        report.max_err_v_slope = std::fmax(report.max_err_v_slope, r.err_v_slope);
    }
    return report;
}

}  // namespace dualport
