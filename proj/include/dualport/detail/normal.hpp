#pragma once

#include <cmath>

namespace dualport::detail {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

/// 1 - Phi(x) without cancellation in the upper tail.
inline double norm_cdf_bar(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779399461;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace dualport::detail
