#include "dualport/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace dualport {

namespace {

constexpr double kScanLo = 1e-8;
constexpr double kScanHi = 1e8;
constexpr int kScanPoints = 4096;
constexpr double kSwitchTol = 1e-12;

void require_positive_y(double y) {
    if (!(y > 0.0) || !std::isfinite(y))
        throw std::domain_error("envelope: y must be a positive finite real");
}

}  // namespace

EnvelopeBundle::EnvelopeBundle(PiecewiseUtility source) : source_(std::move(source)) {
    build_candidates();
    build_table();
}

EnvelopeBundle::Eval EnvelopeBundle::eval_candidate(const ConjugateCandidate& c,
                                                    double y) const {
    if (c.type == ConjugateCandidate::Type::interior) {
        const Segment& s = source_.segments()[c.segment];
        const auto x = s.inverse_marginal(y);
        if (!x || !std::isfinite(*x)) return {-kInf, 0.0, 0.0};
        // Solutions within one noise width of the interval boundary are
        // clamped onto it, so evaluation exactly at a switch sees the
        // candidate's one-sided limit instead of an invalid marker.
        double xs = *x;
        bool clamped = false;
        const double slack = 1e-9 * (1.0 + std::fabs(xs));
        if (xs <= s.x_lo) {
            if (xs < s.x_lo - slack) return {-kInf, 0.0, 0.0};
            xs = s.x_lo;
            clamped = true;
        } else if (xs >= s.x_hi) {
            if (xs > s.x_hi + slack) return {-kInf, 0.0, 0.0};
            xs = s.x_hi;
            clamped = true;
        }
        const double v = s.value(xs) - xs * y;
        if (std::isnan(v)) return {-kInf, 0.0, 0.0};
        return {v, xs, clamped ? 0.0 : 1.0 / s.second_derivative(xs)};
    }
    const double v = c.fixed_u - c.fixed_x * y;
    if (std::isnan(v)) return {-kInf, c.fixed_x, 0.0};
    return {v, c.fixed_x, 0.0};
}

void EnvelopeBundle::build_candidates() {
    const auto& segs = source_.segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const Segment& s = segs[k];
        if (s.is_strictly_concave()) {
            ConjugateCandidate c;
            c.type = ConjugateCandidate::Type::interior;
            c.segment = k;
            all_candidates_.push_back(c);
        }
        {
            ConjugateCandidate c;
            c.type = ConjugateCandidate::Type::left_end;
            c.segment = k;
            c.fixed_x = s.x_lo;
            c.fixed_u = s.value(s.x_lo);  // formula limit, not the stored value
            if (!std::isnan(c.fixed_u)) all_candidates_.push_back(c);
        }
        if (std::isfinite(s.x_hi)) {
            ConjugateCandidate c;
            c.type = ConjugateCandidate::Type::right_end;
            c.segment = k;
            c.fixed_x = s.x_hi;
            c.fixed_u = s.value(s.x_hi);
            if (!std::isnan(c.fixed_u)) all_candidates_.push_back(c);
        }
    }
    const auto bps = source_.breakpoints();
    for (std::size_t j = 0; j < bps.size(); ++j) {
        ConjugateCandidate c;
        c.type = ConjugateCandidate::Type::breakpoint;
        c.fixed_x = bps[j];
        c.fixed_u = source_.breakpoint_values()[j];
        all_candidates_.push_back(c);
    }
}

std::size_t EnvelopeBundle::argmax_candidate(double y) const {
    std::size_t best = 0;
    double best_v = -kInf;
    double best_x = kInf;
    for (std::size_t i = 0; i < all_candidates_.size(); ++i) {
        const Eval e = eval_candidate(all_candidates_[i], y);
        if (e.value > best_v || (e.value == best_v && e.x < best_x)) {
            best = i;
            best_v = e.value;
            best_x = e.x;
        }
    }
    return best;
}

double EnvelopeBundle::candidate_value(std::size_t id, double y) const {
    return eval_candidate(all_candidates_[id], y).value;
}

void EnvelopeBundle::build_table() {
    // Scan a log-spaced grid for changes of the winning candidate, then
    // bisect each change in log space down to |dy| <= 1e-12 and polish the
    // crossing with the closed-form candidate values.
    std::vector<double> grid(kScanPoints);
    const double step = std::log(kScanHi / kScanLo) / (kScanPoints - 1);
    for (int i = 0; i < kScanPoints; ++i) grid[i] = kScanLo * std::exp(step * i);

    std::vector<std::size_t> ids(kScanPoints);
    for (int i = 0; i < kScanPoints; ++i) ids[i] = argmax_candidate(grid[i]);

    struct Cell {
        double lo, hi;
        std::size_t id_lo, id_hi;
    };
    std::vector<Cell> work;
    for (int i = 0; i + 1 < kScanPoints; ++i)
        if (ids[i] != ids[i + 1]) work.push_back({grid[i], grid[i + 1], ids[i], ids[i + 1]});

    struct Switch {
        double y;
        std::size_t left, right;
    };
    std::vector<Switch> switches;

    while (!work.empty()) {
        Cell cell = work.back();
        work.pop_back();
        double lo = cell.lo, hi = cell.hi;
        std::size_t id_lo = cell.id_lo, id_hi = cell.id_hi;
        bool split = false;
        while (hi - lo > kSwitchTol) {
            const double mid = std::sqrt(lo * hi);
            if (!(mid > lo) || !(mid < hi)) break;
            const std::size_t id_mid = argmax_candidate(mid);
            if (id_mid == id_lo) {
                lo = mid;
            } else if (id_mid == id_hi) {
                hi = mid;
            } else {
                work.push_back({lo, mid, id_lo, id_mid});
                work.push_back({mid, hi, id_mid, id_hi});
                split = true;
                break;
            }
        }
        if (split) continue;

        // Polish the crossing of the two candidate value curves.  At a true
        // jump the curves cross transversally and regula falsi reaches
        // machine precision; at a kink they touch tangentially and the
        // location stays noise-limited near sqrt(eps), which the jump
        // threshold below absorbs.
        double a = lo, b = hi;
        double fa = candidate_value(id_lo, a) - candidate_value(id_hi, a);
        double fb = candidate_value(id_lo, b) - candidate_value(id_hi, b);
        if (fa >= 0.0 && fb <= 0.0) {
            for (int it = 0; it < 64 && b - a > 1e-15 * b; ++it) {
                double m = (fa != fb) ? (a - fa * (b - a) / (fb - fa)) : 0.5 * (a + b);
                if (!(m > a) || !(m < b)) m = 0.5 * (a + b);
                if (!(m > a) || !(m < b)) break;
                const double fm = candidate_value(id_lo, m) - candidate_value(id_hi, m);
                if (fm >= 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                    fb = fm;
                }
            }
        }
        switches.push_back({0.5 * (a + b), id_lo, id_hi});
    }

    std::sort(switches.begin(), switches.end(),
              [](const Switch& u, const Switch& v) { return u.y < v.y; });

    table_.boundaries.clear();
    table_.candidates.clear();
    std::size_t current = ids.front();
    table_.candidates.push_back(all_candidates_[current]);
    for (const Switch& sw : switches) {
        table_.boundaries.push_back(sw.y);
        table_.candidates.push_back(all_candidates_[sw.right]);
        current = sw.right;

        const Eval left = eval_candidate(all_candidates_[sw.left], sw.y);
        const Eval right = eval_candidate(all_candidates_[sw.right], sw.y);
        const double xl = left.x, xr = right.x;
        // Chords shorter than 1e-6 of scale are indistinguishable from the
        // kink noise floor and are treated as kinks.
        const double tol = 1e-6 * (1.0 + std::fabs(xl) + std::fabs(xr));
        if (xl - xr > tol) {
            jumps_.push_back({sw.y, xl, xr});
            // I jumps across every affine stretch of the envelope; it is a
            // chord interval only where the envelope strictly dominates U.
            const double mid = 0.5 * (xl + xr);
            const double env_mid = left.value + mid * sw.y;  // V(a_j) + x a_j
            const double u_mid = source_.value(mid);
            if (env_mid > u_mid + 1e-9 * (1.0 + std::fabs(u_mid)))
                chords_.push_back({xr, xl, sw.y});
        }
    }
    std::sort(chords_.begin(), chords_.end(),
              [](const ChordInterval& u, const ChordInterval& v) { return u.lo < v.lo; });
}

const ConjugateCandidate& EnvelopeBundle::active_candidate(double y) const {
    const auto& b = table_.boundaries;
    const std::size_t i = std::upper_bound(b.begin(), b.end(), y) - b.begin();
    return table_.candidates[i];
}

double EnvelopeBundle::conjugate_V(double y) const {
    require_positive_y(y);
    return eval_candidate(active_candidate(y), y).value;
}

double EnvelopeBundle::point_I(double y) const {
    require_positive_y(y);
    return eval_candidate(active_candidate(y), y).x;
}

double EnvelopeBundle::Ictn_prime(double y) const {
    require_positive_y(y);
    return eval_candidate(active_candidate(y), y).dxdy;
}

double EnvelopeBundle::envelope_at_conjugate_point(double y) const {
    require_positive_y(y);
    const Eval e = eval_candidate(active_candidate(y), y);
    return e.value + y * e.x;
}

double EnvelopeBundle::lambda_T(double x) const {
    if (!std::isfinite(x)) throw std::domain_error("lambda_T: non-finite x");
    if (!source_.in_domain(x))
        throw std::domain_error("lambda_T: x below the domain of U");

    const auto reached = [&](double y) { return point_I(y) <= x; };
    double hi = 1.0;
    int n = 0;
    while (!reached(hi)) {
        hi *= 4.0;
        if (++n > 600) return kInf;  // I never descends to x
    }
    double lo = hi;
    n = 0;
    while (reached(lo)) {
        lo *= 0.25;
        if (++n > 600) return 0.0;
    }
    while (hi - lo > 1e-14 * hi) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo) || !(mid < hi)) break;
        (reached(mid) ? hi : lo) = mid;
    }
    return hi;
}

double EnvelopeBundle::envelope_value(double x) const {
    if (!std::isfinite(x)) throw std::domain_error("envelope_value: non-finite x");
    if (!source_.in_domain(x)) return -kInf;
    const double lam = lambda_T(x);
    if (!std::isfinite(lam)) return -kInf;  // open domain, x at the boundary
    return conjugate_V(lam) + x * lam;
}

PiecewiseUtility EnvelopeBundle::envelope_as_utility() const {
    const auto& segs = source_.segments();
    const double L = source_.L();

    // Split points: original segment boundaries plus chord endpoints.
    std::vector<double> cuts;
    for (const Segment& s : segs)
        if (std::isfinite(s.x_hi)) cuts.push_back(s.x_hi);
    for (const ChordInterval& ch : chords_) {
        cuts.push_back(ch.lo);
        cuts.push_back(ch.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double u, double v) { return std::fabs(u - v) <= 1e-11; }),
               cuts.end());
    while (!cuts.empty() && cuts.front() <= L + 1e-11) cuts.erase(cuts.begin());

    const auto chord_at = [&](double xm) -> const ChordInterval* {
        for (const ChordInterval& ch : chords_)
            if (xm > ch.lo && xm < ch.hi) return &ch;
        return nullptr;
    };

    std::vector<Segment> out;
    std::vector<double> values;
    double prev = L;
    for (std::size_t i = 0; i <= cuts.size(); ++i) {
        const double next = (i < cuts.size()) ? cuts[i] : kInf;
        const double xm = std::isfinite(next) ? 0.5 * (prev + next) : prev + 1.0;
        Segment piece;
        if (const ChordInterval* ch = chord_at(xm)) {
            piece.kind = SegmentKind::affine;
            piece.b = ch->slope;
            piece.a = source_.value(ch->lo) - ch->slope * ch->lo;
        } else {
            piece = segs[source_.segment_index(xm)];
        }
        piece.x_lo = prev;
        piece.x_hi = next;
        if (!out.empty()) values.push_back(piece.value(prev));  // U** is continuous
        out.push_back(piece);
        prev = next;
    }
    return PiecewiseUtility(L, source_.domain_open(), std::move(out), std::move(values));
}

EnvelopeBundle EnvelopeBundle::with_active_table(ActiveConjugateTable table) const {
    EnvelopeBundle copy(*this);
    copy.table_ = std::move(table);
    return copy;
}

}  // namespace dualport
