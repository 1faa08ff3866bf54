#include "dualport/piecewise_utility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dualport {

namespace {

void fail(const std::string& what) { throw std::invalid_argument(what); }

// Sign conditions making each kind non-decreasing on any interval.
bool is_non_decreasing(const Segment& s) {
    switch (s.kind) {
        case SegmentKind::constant: return true;
        case SegmentKind::affine: return s.b >= 0.0;
        case SegmentKind::log_shifted: return s.b > 0.0;
        case SegmentKind::power_shifted: return s.b * s.p > 0.0;
        case SegmentKind::exp_shifted: return s.b * s.p > 0.0;
    }
    return false;
}

// The last segment must grow to +inf with marginal utility decaying to 0.
bool valid_tail(const Segment& s) {
    if (s.kind == SegmentKind::log_shifted) return s.b > 0.0;
    if (s.kind == SegmentKind::power_shifted)
        return s.b > 0.0 && s.p > 0.0 && s.p < 1.0;
    return false;
}

}  // namespace

PiecewiseUtility::PiecewiseUtility(double L, bool domain_open,
                                   std::vector<Segment> segments,
                                   std::vector<double> breakpoint_values)
    : L_(L),
      domain_open_(domain_open),
      segments_(std::move(segments)),
      breakpoint_values_(std::move(breakpoint_values)) {
    if (!std::isfinite(L_)) fail("utility: left endpoint L must be finite");
    if (segments_.empty()) fail("utility: at least one segment required");
    if (breakpoint_values_.size() != segments_.size() - 1)
        fail("utility: need exactly one breakpoint value per internal breakpoint");

    const double scale = std::max(1.0, std::fabs(L_));
    if (std::fabs(segments_.front().x_lo - L_) > 1e-12 * scale)
        fail("utility: first segment must start at L");
    segments_.front().x_lo = L_;

    for (std::size_t k = 0; k < segments_.size(); ++k) {
        Segment& s = segments_[k];
        if (!(s.x_lo < s.x_hi)) fail("utility: segment interval is empty");
        if (k + 1 < segments_.size()) {
            if (!std::isfinite(s.x_hi)) fail("utility: only the last segment may be unbounded");
            const double next_lo = segments_[k + 1].x_lo;
            const double tol = 1e-12 * std::max(1.0, std::fabs(s.x_hi));
            if (std::fabs(next_lo - s.x_hi) > tol) {
                std::ostringstream os;
                os << "utility: segments leave a gap or overlap at x=" << s.x_hi;
                fail(os.str());
            }
            segments_[k + 1].x_lo = s.x_hi;
        } else if (std::isfinite(s.x_hi)) {
            fail("utility: segments must tile [L, inf); last x_hi must be +inf");
        }
        if ((s.kind == SegmentKind::log_shifted || s.kind == SegmentKind::power_shifted) &&
            !(s.x_lo >= s.c)) {
            fail("utility: shift singularity c must lie at or below the segment interval");
        }
        if ((s.kind == SegmentKind::log_shifted || s.kind == SegmentKind::power_shifted) &&
            k > 0 && !(s.x_lo > s.c)) {
            fail("utility: interior segment has the shift singularity on its boundary");
        }
        if (!is_non_decreasing(s)) {
            std::ostringstream os;
            os << "utility: segment " << k << " (" << to_string(s.kind) << ") is decreasing";
            fail(os.str());
        }
    }
    if (!valid_tail(segments_.back()))
        fail("utility: last segment must be log_shifted or power_shifted with "
             "b>0 and 0<p<1 so that U -> inf and U' -> 0");
    if (!domain_open_ && !std::isfinite(segments_.front().value(L_)))
        fail("utility: U(L) must be finite when the domain is closed at L");

    // Monotonicity across breakpoints: stored value dominates the left limit
    // and is dominated by the right limit.
    for (std::size_t j = 0; j < breakpoint_values_.size(); ++j) {
        const double xb = segments_[j + 1].x_lo;
        const double ub = breakpoint_values_[j];
        if (!std::isfinite(ub)) fail("utility: breakpoint values must be finite");
        const double left = segments_[j].value(xb);
        const double right = segments_[j + 1].value(xb);
        const double tol = 1e-10 * std::max({1.0, std::fabs(left), std::fabs(right)});
        if (std::isfinite(left) && ub < left - tol) {
            std::ostringstream os;
            os << "utility: value " << ub << " at breakpoint x=" << xb
               << " is below the left limit " << left;
            fail(os.str());
        }
        if (std::isfinite(right) && right < ub - tol) {
            std::ostringstream os;
            os << "utility: right limit " << right << " at breakpoint x=" << xb
               << " is below the stored value " << ub;
            fail(os.str());
        }
    }
}

double PiecewiseUtility::value(double x) const {
    if (std::isnan(x) || std::isinf(x))
        throw std::invalid_argument("utility: non-finite evaluation point");
    if (!in_domain(x)) return -kInf;
    const std::size_t k = segment_index(x);
    if (k > 0 && x == segments_[k].x_lo) return breakpoint_values_[k - 1];
    return segments_[k].value(x);
}

double PiecewiseUtility::left_limit(double x) const {
    const std::size_t k = segment_index(x);
    if (x == segments_[k].x_lo && k > 0) return segments_[k - 1].value(x);
    return segments_[k].value(x);
}

double PiecewiseUtility::right_limit(double x) const {
    return segments_[segment_index(x)].value(x);
}

std::size_t PiecewiseUtility::segment_index(double x) const {
    std::size_t k = segments_.size() - 1;
    while (k > 0 && x < segments_[k].x_lo) --k;
    return k;
}

std::vector<double> PiecewiseUtility::breakpoints() const {
    std::vector<double> out;
    for (std::size_t k = 1; k < segments_.size(); ++k) out.push_back(segments_[k].x_lo);
    return out;
}

PiecewiseUtility make_log_utility() {
    Segment s;
    s.kind = SegmentKind::log_shifted;
    s.a = 0.0;
    s.b = 1.0;
    s.c = 0.0;
    s.x_lo = 0.0;
    s.x_hi = kInf;
    return PiecewiseUtility(0.0, /*domain_open=*/true, {s}, {});
}

PiecewiseUtility make_flat_then_log_utility() {
    Segment flat;
    flat.kind = SegmentKind::constant;
    flat.a = 0.0;
    flat.x_lo = 0.0;
    flat.x_hi = 1.0;

    Segment curve;
    curve.kind = SegmentKind::log_shifted;
    curve.a = 1.0;
    curve.b = 1.0;
    curve.c = 0.0;
    curve.x_lo = 1.0;
    curve.x_hi = kInf;

    // U(1) = 0: the flat piece owns the closed right end of [0, 1].
    return PiecewiseUtility(0.0, /*domain_open=*/false, {flat, curve}, {0.0});
}

PiecewiseUtility make_two_piece_reward_utility() {
    const double e2 = std::exp(2.0);

    Segment flat;
    flat.kind = SegmentKind::constant;
    flat.a = 0.0;
    flat.x_lo = 0.0;
    flat.x_hi = 1.0;

    Segment base;
    base.kind = SegmentKind::log_shifted;
    base.a = 0.0;
    base.b = 1.0;
    base.c = 0.0;
    base.x_lo = 1.0;
    base.x_hi = e2;

    Segment reward;
    reward.kind = SegmentKind::log_shifted;
    reward.a = 1.0;
    reward.b = 1.0;
    reward.c = 0.0;
    reward.x_lo = e2;
    reward.x_hi = kInf;

    // U(1) = 0 and U(e^2) = 3 (the reward applies at the jump point).
    return PiecewiseUtility(0.0, /*domain_open=*/false, {flat, base, reward}, {0.0, 3.0});
}

}  // namespace dualport
