#pragma once

#include <stdexcept>
#include <vector>

#include "dualport/envelope.hpp"
#include "dualport/market.hpp"

namespace dualport {

enum class Weight { one, z, z_squared };
enum class Integrand { one, I, V, UstarstarI, IctnPrime };

/// E[ w(Z_{t,T}) * h(y Z_{t,T}) ] with h one of the conjugate-package
/// functions.  critical_y lists the y-locations where h's argument crosses a
/// conjugate switch (jumps and kinks of I); panels are split at every
/// preimage so each panel sees an analytic integrand.
struct ExpectationRequest {
    double t = 0.0;
    double y = 1.0;
    Weight weight = Weight::z;
    Integrand integrand = Integrand::I;
    std::vector<double> critical_y;
};

struct QuadratureConfig {
    double rel_tol = 1e-11;
    int max_levels = 20;
    int order = 40;
};

/// Raised when panel bisection has not met rel_tol after max_levels rounds.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double estimate, double gap)
        : std::runtime_error(what), estimate_(estimate), gap_(gap) {}
    double estimate() const { return estimate_; }
    double gap() const { return gap_; }

private:
    double estimate_;
    double gap_;
};

/// Computes the requested expectation by substituting
/// z = exp(-(r + |theta|^2/2) tau - |theta| sqrt(tau) n), n standard normal,
/// and applying composite Gauss-Legendre panels bisected until the estimate
/// is stable to rel_tol.  The window [-10, 10] is widened when a jump
/// preimage falls outside it, so tail-supported integrands keep full
/// relative accuracy.
double expect(const MarketModel& m, const EnvelopeBundle& b,
              const ExpectationRequest& req, const QuadratureConfig& cfg = {});

}  // namespace dualport
