#pragma once

#include <string>
#include <vector>

#include "dualport/envelope.hpp"

namespace dualport {

enum class CheckLevel { pass, warn, fail };

struct CheckEntry {
    std::string name;
    CheckLevel level;
    std::string message;
};

struct ValidationReport {
    std::vector<CheckEntry> entries;
    // Log-log regression estimates for I(y) <= C0 * y^-M near y = 0.
    double C0_hat = 0.0;
    double M_hat = 0.0;
    bool has_growth_estimate = false;

    void add(std::string name, CheckLevel level, std::string message) {
        entries.push_back({std::move(name), level, std::move(message)});
    }
    CheckLevel worst() const {
        CheckLevel w = CheckLevel::pass;
        for (const auto& e : entries) {
            if (e.level == CheckLevel::fail) return CheckLevel::fail;
            if (e.level == CheckLevel::warn) w = CheckLevel::warn;
        }
        return w;
    }
};

std::string to_string(CheckLevel level);

/// Checks the structural and asymptotic assumptions behind the duality
/// machinery: monotonicity, upper semicontinuity at each breakpoint
/// (warning only; see README), decay of the envelope slope at +inf, blow-up
/// of the slope at L for open domains, and the polynomial growth estimate
/// for I near y = 0.
ValidationReport validate_assumptions(const PiecewiseUtility& u, const EnvelopeBundle& b);

}  // namespace dualport
