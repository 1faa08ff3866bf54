#pragma once

#include <cmath>
#include <stdexcept>

namespace dualport::detail {

/// Brent's method on a bracketing interval [a, b] with f(a) * f(b) <= 0.
/// Terminates when the bracket width falls below rel_tol * |x| (plus a tiny
/// absolute floor) or when f evaluates to exactly zero.
template <class F>
double brent(F&& f, double a, double b, double fa, double fb,
             double rel_tol = 1e-12, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("brent: root not bracketed");

    if (std::fabs(fa) < std::fabs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a;
    bool mflag = true;

    for (int it = 0; it < max_iter; ++it) {
        const double tol = rel_tol * std::fabs(b) + 1e-300;
        if (fb == 0.0 || std::fabs(b - a) <= tol) return b;

        double s;
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) +
                b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }

        const double lo = 0.25 * (3.0 * a + b);
        const bool out_of_range = (s < std::fmin(lo, b)) || (s > std::fmax(lo, b));
        const bool slow = mflag ? std::fabs(s - b) >= 0.5 * std::fabs(b - c)
                                : std::fabs(s - b) >= 0.5 * std::fabs(c - d);
        const bool tiny = mflag ? std::fabs(b - c) < tol : std::fabs(c - d) < tol;
        // s == a or s == b stalls when the secant step underflows (values of
        // hugely different magnitude); force the bisection branch then.
        if (out_of_range || slow || tiny || s == a || s == b) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }

        const double fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::fabs(fa) < std::fabs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return b;
}

}  // namespace dualport::detail
