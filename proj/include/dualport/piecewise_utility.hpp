#pragma once

#include <vector>

#include "dualport/segment.hpp"

namespace dualport {

/// A possibly non-concave, possibly discontinuous utility on [L, inf).
/// Segments tile [L, inf) with half-open intervals; the utility value at an
/// internal breakpoint is stored explicitly so that jump utilities are
/// represented exactly.  Outside the effective domain the utility is -inf.
class PiecewiseUtility {
public:
    /// Throws std::invalid_argument when the segment list does not tile
    /// [L, inf), is non-monotone, or places a shift singularity inside an
    /// interval.
    PiecewiseUtility(double L, bool domain_open, std::vector<Segment> segments,
                     std::vector<double> breakpoint_values);

    double L() const { return L_; }
    bool domain_open() const { return domain_open_; }
    const std::vector<Segment>& segments() const { return segments_; }
    const std::vector<double>& breakpoint_values() const { return breakpoint_values_; }

    bool in_domain(double x) const {
        return domain_open_ ? x > L_ : x >= L_;
    }

    /// U(x); -inf outside the domain, explicit stored value at breakpoints.
    /// Throws std::invalid_argument for non-finite x.
    double value(double x) const;

    /// Left and right limits of U at x computed from the segment formulas.
    double left_limit(double x) const;
    double right_limit(double x) const;

    /// Index of the segment whose interval contains x (breakpoints belong to
    /// the right segment).  Precondition: x in [L, inf).
    std::size_t segment_index(double x) const;

    /// Internal breakpoints (the x_lo of every segment but the first).
    std::vector<double> breakpoints() const;

private:
    double L_;
    bool domain_open_;
    std::vector<Segment> segments_;
    std::vector<double> breakpoint_values_;
};

/// Convenience factories for the utilities used throughout the test-suite
/// and the docs.
PiecewiseUtility make_log_utility();                 // log(x) on (0, inf)
PiecewiseUtility make_flat_then_log_utility();       // 0 on [0,1], log(x)+1 on (1, inf)
PiecewiseUtility make_two_piece_reward_utility();    // max(0, log x) with a +1 jump at e^2

}  // namespace dualport
