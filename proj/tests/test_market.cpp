#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dualport/detail/philox.hpp"
#include "dualport/market.hpp"
#include "fixtures.hpp"

using namespace dualport;

TEST_CASE("market price of risk for the figure parameters") {
    const MarketModel m = fixtures::figure_market();
    REQUIRE(m.dim() == 1);
    CHECK(m.theta()[0] == doctest::Approx(0.12).epsilon(1e-14));
    CHECK(m.theta_norm() == doctest::Approx(0.12).epsilon(1e-14));
}

TEST_CASE("market invariants are enforced") {
    // singular volatility
    CHECK_THROWS_AS(MarketModel(0.05, {0.1, 0.1},
                                {{0.2, 0.2}, {0.2, 0.2}}, 1.0),
                    std::invalid_argument);
    // zero market price of risk
    CHECK_THROWS_AS(MarketModel(0.05, {0.05}, {{0.3}}, 1.0), std::invalid_argument);
    // bad horizon / dimension
    CHECK_THROWS_AS(MarketModel(0.05, {0.086}, {{0.3}}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(MarketModel(0.05, {}, {}, 1.0), std::invalid_argument);
    // multi-asset with well-conditioned sigma is fine
    const MarketModel m2(0.03, {0.07, 0.05}, {{0.25, 0.0}, {0.05, 0.2}}, 2.0);
    CHECK(m2.theta_norm() > 0.0);
}

TEST_CASE("kernel ratio distribution") {
    const MarketModel m = fixtures::figure_market();

    SUBCASE("cdf approaches one and is monotone") {
        CHECK(m.z_cdf(0.0, 1e9) >= 1.0 - 1e-12);
        CHECK(m.z_cdf(0.0, 0.0) == 0.0);
        double prev = -1.0;
        for (double z = 0.05; z < 20.0; z *= 1.3) {
            const double c = m.z_cdf(2.0, z);
            CHECK(c >= prev);
            prev = c;
        }
        CHECK_THROWS_AS(m.z_cdf(10.0, 1.0), std::domain_error);
    }

    SUBCASE("pdf integrates to one and reproduces the kernel mean") {
        // Simpson on the log-z substitution, independent of the library's
        // quadrature module.
        const double t = 3.0;
        const double tau = m.T() - t;
        const double s = m.theta_norm() * std::sqrt(tau);
        const double mid = -m.kernel_drift() * tau;
        const int n = 200000;
        const double lo = mid - 40.0 * s, hi = mid + 40.0 * s;
        const double h = (hi - lo) / n;
        double mass = 0.0, mean = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double z = std::exp(lo + i * h);
            mass += w * m.z_pdf(t, z) * z;  // dz = z dlog(z)
            mean += w * m.z_pdf(t, z) * z * z;
        }
        mass *= h / 3.0;
        mean *= h / 3.0;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(mean == doctest::Approx(m.kernel_mean(t, m.T())).epsilon(1e-9));
    }
}

TEST_CASE("kernel mean closed form") {
    const MarketModel m = fixtures::figure_market();
    CHECK(m.kernel_mean(0.0, 10.0) ==
          doctest::Approx(0.60653065971263342).epsilon(1e-14));
    CHECK(m.kernel_mean(4.0, 4.0) == 1.0);
    CHECK_THROWS_AS(m.kernel_mean(5.0, 4.0), std::domain_error);

    const MarketModel driftless(0.0, {0.06}, {{0.3}}, 10.0);
    CHECK(driftless.kernel_mean(1.0, 7.0) == 1.0);
}

TEST_CASE("philox uniforms are well distributed") {
    double sum = 0.0, sum_sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto w = detail::Philox4x32::block(42, 0, i);
        const double u = detail::uniform_from_words(w[0], w[1]);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        sum += u;
        sum_sq += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(5e-3));
    CHECK(sum_sq / n == doctest::Approx(1.0 / 3.0).epsilon(5e-3));
}

TEST_CASE("counter normals: moments and stream independence") {
    const detail::CounterNormal normal(7, 3);
    const int n = 200000;
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = normal(i);
        m1 += x;
        m2 += x * x;
        m3 += x * x * x;
        m4 += x * x * x * x;
    }
    m1 /= n;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    CHECK(std::fabs(m1) < 0.01);
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::fabs(m3) < 0.03);
    CHECK(m4 == doctest::Approx(3.0).epsilon(0.03));

    // different stream, same indices: decorrelated
    const detail::CounterNormal other(7, 4);
    double dot = 0;
    for (int i = 0; i < n; ++i) dot += normal(i) * other(i);
    CHECK(std::fabs(dot / n) < 0.01);
}

TEST_CASE("kernel path sampling") {
    const MarketModel m = fixtures::figure_market();
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(10.0 * k / 20.0);

    SUBCASE("sample mean of xi_T within 3 standard errors of exp(-rT)") {
        const auto paths = sample_kernel_paths(m, times, 100000, 99);
        double sum = 0, sum_sq = 0;
        for (const auto& p : paths) {
            sum += p.xi.back();
            sum_sq += p.xi.back() * p.xi.back();
        }
        const double n = double(paths.size());
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq - sum * sum / n) / (n - 1) / n);
        CHECK(std::fabs(mean - std::exp(-0.5)) <= 3.0 * se);

        // and at every grid time for a smaller batch
        const auto small = sample_kernel_paths(m, times, 20000, 123);
        for (std::size_t j = 1; j < times.size(); ++j) {
            double s1 = 0, s2 = 0;
            for (const auto& p : small) {
                s1 += p.xi[j];
                s2 += p.xi[j] * p.xi[j];
            }
            const double nn = double(small.size());
            const double mu = s1 / nn;
            const double sd = std::sqrt((s2 - s1 * s1 / nn) / (nn - 1) / nn);
            CHECK(std::fabs(mu - std::exp(-0.05 * times[j])) <= 3.5 * sd);
        }
    }

    SUBCASE("determinism and worker independence") {
        const auto a = sample_kernel_paths(m, times, 64, 7, 1);
        const auto b = sample_kernel_paths(m, times, 64, 7, 4);
        REQUIRE(a.size() == b.size());
        for (std::size_t p = 0; p < a.size(); ++p)
            for (std::size_t j = 0; j < times.size(); ++j)
                CHECK(a[p].xi[j] == b[p].xi[j]);  // bitwise
    }

    SUBCASE("trivial grid") {
        const auto paths = sample_kernel_paths(m, {0.0}, 5, 1);
        for (const auto& p : paths) {
            REQUIRE(p.xi.size() == 1);
            CHECK(p.xi[0] == 1.0);
        }
    }

    SUBCASE("multiplicativity of kernel ratios along a path") {
        const auto paths = sample_kernel_paths(m, times, 16, 5);
        for (const auto& p : paths) {
            const double z_05 = p.xi[10] / p.xi[0];
            const double z_5T = p.xi.back() / p.xi[10];
            const double z_0T = p.xi.back() / p.xi[0];
            CHECK(z_05 * z_5T == doctest::Approx(z_0T).epsilon(1e-14));
        }
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(sample_kernel_paths(m, times, 0, 1), std::invalid_argument);
        CHECK_THROWS_AS(sample_kernel_paths(m, {}, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(sample_kernel_paths(m, {0.0, 0.0}, 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(sample_kernel_paths(m, {1.0, 2.0}, 1, 1), std::invalid_argument);
    }
}
