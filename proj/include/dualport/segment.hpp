#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace dualport {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SegmentKind { constant, affine, log_shifted, power_shifted, exp_shifted };

std::string to_string(SegmentKind k);
SegmentKind segment_kind_from_string(const std::string& s);

/// One closed-form piece of a utility function on the half-open interval
/// [x_lo, x_hi).  Value conventions:
///   constant:      a
///   affine:        a + b*x
///   log_shifted:   a + b*log(x - c)
///   power_shifted: a + b*(x - c)^p
///   exp_shifted:   a + b*exp(p*x)
struct Segment {
    SegmentKind kind = SegmentKind::constant;
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    double p = 0.0;
    double x_lo = 0.0;
    double x_hi = kInf;

    double value(double x) const {
        switch (kind) {
            case SegmentKind::constant: return a;
            case SegmentKind::affine: return a + b * x;
            case SegmentKind::log_shifted: return a + b * std::log(x - c);
            case SegmentKind::power_shifted: return a + b * std::pow(x - c, p);
            case SegmentKind::exp_shifted: return a + b * std::exp(p * x);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    double derivative(double x) const {
        switch (kind) {
            case SegmentKind::constant: return 0.0;
            case SegmentKind::affine: return b;
            case SegmentKind::log_shifted: return b / (x - c);
            case SegmentKind::power_shifted: return b * p * std::pow(x - c, p - 1.0);
            case SegmentKind::exp_shifted: return b * p * std::exp(p * x);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    double second_derivative(double x) const {
        switch (kind) {
            case SegmentKind::constant: return 0.0;
            case SegmentKind::affine: return 0.0;
            case SegmentKind::log_shifted: return -b / ((x - c) * (x - c));
            case SegmentKind::power_shifted:
                return b * p * (p - 1.0) * std::pow(x - c, p - 2.0);
            case SegmentKind::exp_shifted: return b * p * p * std::exp(p * x);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    /// True when the segment is concave on its whole interval (curvature has
    /// a fixed sign for every kind in the library).
    bool is_concave() const {
        switch (kind) {
            case SegmentKind::constant:
            case SegmentKind::affine: return true;
            case SegmentKind::log_shifted: return b > 0.0;
            case SegmentKind::power_shifted: return b * p * (p - 1.0) < 0.0;
            case SegmentKind::exp_shifted: return b < 0.0;
        }
        return false;
    }

    bool is_strictly_concave() const {
        return is_concave() &&
               kind != SegmentKind::constant && kind != SegmentKind::affine;
    }

    /// Solves derivative(x) = y for x, ignoring the interval.  Only defined
    /// for the strictly concave kinds (where the marginal is invertible).
    std::optional<double> inverse_marginal(double y) const {
        if (y <= 0.0 || !is_strictly_concave()) return std::nullopt;
        switch (kind) {
            case SegmentKind::log_shifted: return c + b / y;
            case SegmentKind::power_shifted: {
                const double bp = b * p;
                if (bp <= 0.0) return std::nullopt;
                return c + std::pow(y / bp, 1.0 / (p - 1.0));
            }
            case SegmentKind::exp_shifted: {
                const double bp = b * p;
                if (bp <= 0.0) return std::nullopt;
                return std::log(y / bp) / p;
            }
            default: return std::nullopt;
        }
    }
};

inline std::string to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::constant: return "constant";
        case SegmentKind::affine: return "affine";
        case SegmentKind::log_shifted: return "log_shifted";
        case SegmentKind::power_shifted: return "power_shifted";
        case SegmentKind::exp_shifted: return "exp_shifted";
    }
    return "?";
}

inline SegmentKind segment_kind_from_string(const std::string& s) {
    if (s == "constant") return SegmentKind::constant;
    if (s == "affine") return SegmentKind::affine;
    if (s == "log_shifted") return SegmentKind::log_shifted;
    if (s == "power_shifted") return SegmentKind::power_shifted;
    if (s == "exp_shifted") return SegmentKind::exp_shifted;
    throw std::invalid_argument("unknown segment kind: " + s);
}

}  // namespace dualport
