#pragma once

namespace dualport::example_oracle {

/// Closed forms for the worked example: the flat-then-log utility in the
/// one-asset market r = 0.05, mu = 0.086, sigma = 0.3, T = 10.  Every
/// function is a literal transcription of the analytic displays and never
/// calls the generic engine; the test and acceptance suites use them as the
/// independent reference.
struct ExampleParams {
    double r = 0.05;
    double mu = 0.086;
    double sigma = 0.3;
    double T = 10.0;

    double theta() const { return (mu - r) / sigma; }
    double drift() const { return r + 0.5 * theta() * theta(); }
};

double oracle_d(const ExampleParams& p, double t, double y);
double oracle_g(const ExampleParams& p, double t, double y);
double oracle_g_prime(const ExampleParams& p, double t, double y);
double oracle_v(const ExampleParams& p, double t, double y);
double oracle_v_prime(const ExampleParams& p, double t, double y);

/// u(t, x): inverts oracle_g by bisection (oracle-internal), then applies
/// the closed form of the value function.
double oracle_u(const ExampleParams& p, double t, double x);

/// The multiplier obtained by inverting oracle_g in y.
double oracle_multiplier(const ExampleParams& p, double t, double x);

}  // namespace dualport::example_oracle
