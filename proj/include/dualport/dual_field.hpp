#pragma once

#include <vector>

#include "dualport/envelope.hpp"
#include "dualport/market.hpp"
#include "dualport/quadrature.hpp"

namespace dualport {

/// Effective wealth domain and the t=0 multiplier range.
/// L_hat = max(L e^{-rT}, L); wealth arguments live in (L_hat, inf).
struct DomainSpec {
    double L_hat = 0.0;
    double D_I_upper0 = 0.0;  // lim_{x -> L_hat} multiplier at t = 0; may be +inf
};

struct VerifyRow {
    double t, x, y;
    double err_multiplier;  // multiplier vs conjugate minimiser
    double err_value_slope; // multiplier vs FD of du/dx
    double err_fenchel;     // u vs v + x y
    double err_v_slope;     // FD of dv/dy vs -g
};

struct VerifyReport {
    static constexpr double kTolMultiplier = 1e-8;
    static constexpr double kTolValueSlope = 1e-5;
    static constexpr double kTolFenchel = 1e-9;
    static constexpr double kTolVSlope = 1e-6;

    std::vector<VerifyRow> rows;
    double max_err_multiplier = 0.0;
    double max_err_value_slope = 0.0;
    double max_err_fenchel = 0.0;
    double max_err_v_slope = 0.0;

    bool multiplier_ok() const { return max_err_multiplier <= kTolMultiplier; }
    bool value_slope_ok() const { return max_err_value_slope <= kTolValueSlope; }
    bool fenchel_ok() const { return max_err_fenchel <= kTolFenchel; }
    bool v_slope_ok() const { return max_err_v_slope <= kTolVSlope; }
    bool all_ok() const {
        return multiplier_ok() && value_slope_ok() && fenchel_ok() && v_slope_ok();
    }
};

/// Evaluator for the dual objects g, multiplier, u, v and their derivative
/// identities on [0, T) x (L_hat, inf).  At t = T the conventions
/// v(T,.) = V, i(T,.) = I, lambda(T,.) = Lambda apply; the kernel is
/// degenerate there and no quadrature is attempted.  Immutable and
/// thread-safe after construction.
class DualField {
public:
    DualField(MarketModel market, EnvelopeBundle bundle, QuadratureConfig quad = {});

    const MarketModel& market() const { return market_; }
    const EnvelopeBundle& bundle() const { return bundle_; }
    const DomainSpec& domain() const { return domain_; }
    const QuadratureConfig& quadrature_config() const { return quad_; }

    /// Budget map g(t, y) = E[Z I(y Z)]; g(T, y) = I(y).
    double g(double t, double y) const;

    /// dg/dy via the distributional derivative: continuous part plus the
    /// Dirac masses (I(a+)-I(a-)) a^2/y^3 f_Z(a/y) at each jump a of I.
    double g_prime(double t, double y) const;

    /// The multiplier: unique y with g(t, y) = x, by bracketing (geometric
    /// expansion from y = 1, factor 4) and Brent iteration to 1e-12 relative.
    /// Throws std::domain_error for x <= L_hat, std::range_error when x is
    /// outside the range of g(t, .).
    double multiplier_Y(double t, double x) const;

    /// u(t,x) = E[U**(I(Y Z))], computed by direct quadrature and checked
    /// against the Fenchel route v + x y; disagreement beyond 1e-7 relative
    /// raises std::runtime_error.
    double value_u(double t, double x) const;

    /// v(t,y) = E[V(y Z)]; v(T,y) = V(y).
    double conjugate_v(double t, double y) const;

    /// lambda(t,x): the theorem identity route (= multiplier_Y).
    double lambda(double t, double x) const;

    /// Independent route: minimises v(t,y) + x y by solving -dv/dy = x with
    /// dv/dy from central finite differences of conjugate_v.
    double lambda_via_conjugate(double t, double x) const;

    /// Upper end of the multiplier range at time t (+inf when the budget map
    /// descends exactly to L_hat).
    double multiplier_upper_limit(double t) const;

    /// Four-identity verification over a (t, x) grid.
    VerifyReport verify_identities(const std::vector<double>& t_grid,
                                   const std::vector<double>& x_grid,
                                   unsigned workers = 0) const;

    /// dv/dy by five-point central differences of conjugate_v.
    double v_slope_fd(double t, double y) const;

private:
    double expect_req(double t, double y, Weight w, Integrand h) const;
    void check_wealth(double x) const;

    MarketModel market_;
    EnvelopeBundle bundle_;
    QuadratureConfig quad_;
    DomainSpec domain_;
    double bracket_factor_ = 4.0;
    int max_expansions_ = 200;
    double root_rel_tol_ = 1e-12;
};

}  // namespace dualport
