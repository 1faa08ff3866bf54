#pragma once

#include <cstddef>
#include <vector>

#include "dualport/piecewise_utility.hpp"

namespace dualport {

/// One closed-form candidate for the maximizer of U(x) - x*y.  Either the
/// interior stationary point of a strictly concave segment (x depends on y)
/// or a fixed abscissa (segment endpoint limit or stored breakpoint value).
struct ConjugateCandidate {
    enum class Type { interior, left_end, right_end, breakpoint };
    Type type = Type::breakpoint;
    std::size_t segment = 0;  // owning segment; unused for breakpoint kind
    double fixed_x = 0.0;     // abscissa for the fixed kinds
    double fixed_u = 0.0;     // utility value (formula limit or stored value)
};

/// Map y -> active candidate.  candidates[i] is active on
/// [boundaries[i-1], boundaries[i]) with boundaries[-1] = 0, boundaries[n] = inf.
struct ActiveConjugateTable {
    std::vector<double> boundaries;
    std::vector<ConjugateCandidate> candidates;  // size = boundaries.size() + 1
};

struct JumpPoint {
    double y;        // jump location a_j of I
    double I_left;   // I(a_j-)
    double I_right;  // I(a_j+), always < I_left
};

struct ChordInterval {
    double lo;     // a_k = I(a_j+)
    double hi;     // b_k = I(a_j-)
    double slope;  // the chord slope equals the jump location a_j
};

/// The full Legendre-Fenchel conjugate package of a piecewise utility:
/// V(y) = sup_x {U(x) - xy}, the smallest maximizer I(y), the generalized
/// inverse Lambda(x) = inf{y : I(y) <= x}, the concave envelope
/// U**(x) = V(Lambda(x)) + x Lambda(x), the jump set of I and the derivative
/// of its continuous part.
///
/// Construction scans a log-spaced y grid for changes of the active
/// closed-form candidate and bisects every switch, so V, I and the jump set
/// are semi-analytic: no sampling error away from the switch locations.
/// Immutable after construction; every evaluation is const and thread-safe.
class EnvelopeBundle {
public:
    explicit EnvelopeBundle(PiecewiseUtility source);

    const PiecewiseUtility& source() const { return source_; }

    /// V(y).  Throws std::domain_error for y <= 0 or non-finite y.
    double conjugate_V(double y) const;

    /// Smallest maximizer I(y) of U(x) - xy.  Throws like conjugate_V.
    double point_I(double y) const;

    /// Lambda(x) = inf{y > 0 : I(y) <= x}.  Throws std::domain_error when x
    /// is below the domain of U.  May return +inf when the infimum is empty.
    double lambda_T(double x) const;

    /// Concave envelope U**(x); -inf outside the domain of U.
    double envelope_value(double x) const;

    /// Right-hand derivative of the continuous part of I.  Zero wherever I
    /// is locally constant (equivalently: y outside range (U**)').
    double Ictn_prime(double y) const;

    /// U**(I(y)) = V(y) + y I(y), evaluated from the active candidate in one
    /// step.  Equals U(I(y)) wherever the supremum is attained and carries
    /// the envelope limit at contact points where U is not upper
    /// semicontinuous.
    double envelope_at_conjugate_point(double y) const;

    const std::vector<JumpPoint>& jump_set() const { return jumps_; }
    const std::vector<ChordInterval>& chord_intervals() const { return chords_; }

    /// Every y where the active conjugate candidate switches (jump locations
    /// of I plus kink locations); used for quadrature panel splitting.
    const std::vector<double>& switch_ys() const { return table_.boundaries; }

    const ActiveConjugateTable& active_table() const { return table_; }

    /// U** as a new PiecewiseUtility (original segments off the chords,
    /// affine pieces across them).  Feeding the result back through
    /// EnvelopeBundle reproduces the same envelope (biconjugacy).
    PiecewiseUtility envelope_as_utility() const;

    /// Returns a copy evaluating through a replacement active table.
    /// Diagnostic hook: verification suites corrupt the table to show that
    /// the theorem checks detect a broken conjugate package.
    EnvelopeBundle with_active_table(ActiveConjugateTable table) const;

    /// Evaluates U(x) honouring stored breakpoint values; -inf outside dom.
    double utility_value(double x) const { return source_.value(x); }

private:
    struct Eval {
        double value;
        double x;
        double dxdy;
    };

    Eval eval_candidate(const ConjugateCandidate& c, double y) const;
    const ConjugateCandidate& active_candidate(double y) const;
    std::size_t argmax_candidate(double y) const;
    void build_candidates();
    void build_table();
    double candidate_value(std::size_t id, double y) const;

    PiecewiseUtility source_;
    std::vector<ConjugateCandidate> all_candidates_;
    ActiveConjugateTable table_;
    std::vector<JumpPoint> jumps_;
    std::vector<ChordInterval> chords_;
};

}  // namespace dualport
