#include "dualport/validation.hpp"

#include <cmath>
#include <sstream>

namespace dualport {

std::string to_string(CheckLevel level) {
    switch (level) {
        case CheckLevel::pass: return "pass";
        case CheckLevel::warn: return "warn";
        case CheckLevel::fail: return "fail";
    }
    return "?";
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

ValidationReport validate_assumptions(const PiecewiseUtility& u, const EnvelopeBundle& b) {
    ValidationReport r;
    const auto& segs = u.segments();

    // Tiling and per-segment monotonicity are constructor invariants; verify
    // them anyway so a report on a hand-built object is self-contained.
    bool tiled = segs.front().x_lo == u.L() && !std::isfinite(segs.back().x_hi);
    for (std::size_t k = 0; k + 1 < segs.size(); ++k)
        tiled = tiled && segs[k].x_hi == segs[k + 1].x_lo;
    r.add("segments.tiling", tiled ? CheckLevel::pass : CheckLevel::fail,
          tiled ? "segments tile [L, inf)" : "segments leave gaps");

    bool monotone = true;
    for (const Segment& s : segs) {
        const double lo = std::isfinite(s.x_hi) ? s.x_lo : s.x_lo + 1e-9;
        const double hi = std::isfinite(s.x_hi) ? s.x_hi : s.x_lo + 1e3 + 1.0;
        for (int i = 1; i < 32 && monotone; ++i) {
            const double x = lo + (hi - lo) * i / 32.0;
            monotone = s.derivative(x) >= -1e-12;
        }
    }
    for (std::size_t j = 0; j < u.breakpoint_values().size() && monotone; ++j) {
        const double xb = segs[j + 1].x_lo;
        monotone = u.breakpoint_values()[j] >= u.left_limit(xb) - 1e-10;
    }
    r.add("monotonicity", monotone ? CheckLevel::pass : CheckLevel::fail,
          monotone ? "U is non-decreasing" : "U decreases somewhere");

    // Upper semicontinuity at breakpoints: U(x_b) >= max of one-sided limits.
    for (std::size_t j = 0; j < u.breakpoint_values().size(); ++j) {
        const double xb = segs[j + 1].x_lo;
        const double ub = u.breakpoint_values()[j];
        const double lim = std::max(u.left_limit(xb), u.right_limit(xb));
        std::ostringstream name;
        name << "usc.breakpoint.x=" << fmt(xb);
        if (ub >= lim - 1e-10 * std::max(1.0, std::fabs(lim))) {
            r.add(name.str(), CheckLevel::pass, "upper semicontinuous");
        } else {
            std::ostringstream msg;
            msg << "U(" << fmt(xb) << ")=" << fmt(ub) << " is below the limit "
                << fmt(lim) << "; the conjugate chord bridges the gap";
            r.add(name.str(), CheckLevel::warn, msg.str());
        }
    }

    // (U**)'(x) -> 0 as x -> inf, probed through Lambda.
    {
        double x_big = 1e6;
        for (const Segment& s : segs)
            if (std::isfinite(s.x_hi)) x_big = std::max(x_big, 100.0 * std::fabs(s.x_hi));
        const double slope = b.lambda_T(x_big);
        const bool ok = slope <= 1e-3;
        r.add("limit.slope_at_inf", ok ? CheckLevel::pass : CheckLevel::warn,
              "envelope slope at x=" + fmt(x_big) + " is " + fmt(slope));
    }

    // Open domains additionally need (U**)'(x) -> inf as x -> L.
    if (u.domain_open()) {
        const double eps = 1e-8 * std::max(1.0, std::fabs(u.L()));
        const double slope = b.lambda_T(u.L() + eps);
        const bool ok = slope >= 1e3;
        r.add("limit.slope_at_L", ok ? CheckLevel::pass : CheckLevel::warn,
              "envelope slope at L+" + fmt(eps) + " is " + fmt(slope));
    }

    // Growth estimate: fit log I(y) = log C0 - M log y on y in [1e-8, 1e-2].
    {
        const int n = 32;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int i = 0; i < n; ++i) {
            const double y = 1e-8 * std::pow(1e6, i / double(n - 1));
            const double I = b.point_I(y);
            if (I > 0.0 && std::isfinite(I)) {
                const double lx = std::log(y), ly = std::log(I);
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
                ++m;
            }
        }
        if (m >= 2) {
            const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            const double intercept = (sy - slope * sx) / m;
            r.M_hat = -slope;
            r.C0_hat = std::exp(intercept);
            r.has_growth_estimate = true;
            r.add("growth.I", CheckLevel::pass,
                  "I(y) ~ C0 y^-M with C0=" + fmt(r.C0_hat) + ", M=" + fmt(r.M_hat));
        } else {
            r.add("growth.I", CheckLevel::warn, "not enough positive I samples to fit");
        }
    }

    return r;
}

}  // namespace dualport
