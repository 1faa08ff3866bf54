#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dualport/envelope.hpp"
#include "dualport/market.hpp"
#include "dualport/piecewise_utility.hpp"

namespace fixtures {

inline dualport::MarketModel figure_market() {
    return dualport::MarketModel(0.05, {0.086}, {{0.3}}, 10.0);
}

inline dualport::PiecewiseUtility flat_log() { return dualport::make_flat_then_log_utility(); }
inline dualport::PiecewiseUtility pure_log() { return dualport::make_log_utility(); }
inline dualport::PiecewiseUtility two_piece() {
    return dualport::make_two_piece_reward_utility();
}

/// Smallest maximizer of U(x) - x*y over an n-point grid on [L, x_max].
inline double brute_force_argmax(const dualport::PiecewiseUtility& u, double y,
                                 double x_max, std::size_t n) {
    double best_x = u.L();
    double best_v = -dualport::kInf;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = u.L() + (x_max - u.L()) * double(i) / double(n);
        const double v = u.value(x) - x * y;
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return best_x;
}

struct HullPoint {
    double x, y;
};

/// Upper concave hull of sampled (x, U(x)) points (monotone chain), queried
/// by linear interpolation.  Breakpoints are included exactly.
class SampledHull {
public:
    SampledHull(const dualport::PiecewiseUtility& u, double x_max, std::size_t n) {
        std::vector<double> xs;
        xs.reserve(n + 8);
        for (std::size_t i = 0; i <= n; ++i)
            xs.push_back(u.L() + (x_max - u.L()) * double(i) / double(n));
        for (double b : u.breakpoints())
            if (b < x_max) xs.push_back(b);
        std::sort(xs.begin(), xs.end());

        std::vector<HullPoint> pts;
        pts.reserve(xs.size());
        for (double x : xs) {
            const double v = u.value(x);
            if (std::isfinite(v)) pts.push_back({x, v});
        }
        for (const HullPoint& p : pts) {
            while (hull_.size() >= 2 && cross(hull_[hull_.size() - 2], hull_.back(), p) >= 0.0)
                hull_.pop_back();
            hull_.push_back(p);
        }
    }

    double operator()(double x) const {
        std::size_t lo = 0, hi = hull_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (hull_[mid].x <= x ? lo : hi) = mid;
        }
        const HullPoint a = hull_[lo], b = hull_[hi];
        const double w = (x - a.x) / (b.x - a.x);
        return a.y + w * (b.y - a.y);
    }

private:
    static double cross(const HullPoint& o, const HullPoint& a, const HullPoint& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    }
    std::vector<HullPoint> hull_;
};

inline std::mt19937_64 rng(std::uint64_t seed = 20240917) { return std::mt19937_64(seed); }

}  // namespace fixtures
