#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dualport/envelope.hpp"
#include "dualport/validation.hpp"
#include "fixtures.hpp"

using namespace dualport;

namespace {

const double e2 = std::exp(2.0);

}  // namespace

TEST_CASE("utility evaluation on the flat-then-log example") {
    const PiecewiseUtility u = fixtures::flat_log();
    CHECK(u.value(0.5) == 0.0);
    CHECK(u.value(std::exp(1.0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(u.value(-1.0) == -kInf);
    CHECK(u.value(1.0) == 0.0);  // stored breakpoint value, not the right limit
    CHECK(u.value(0.0) == 0.0);
    CHECK_THROWS_AS(u.value(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(u.value(kInf), std::invalid_argument);
}

TEST_CASE("segment structure violations are rejected") {
    Segment flat;
    flat.kind = SegmentKind::constant;
    flat.x_lo = 0.0;
    flat.x_hi = 1.0;
    Segment curve;
    curve.kind = SegmentKind::log_shifted;
    curve.x_lo = 1.5;  // gap
    curve.x_hi = kInf;
    CHECK_THROWS_AS(PiecewiseUtility(0.0, false, {flat, curve}, {0.0}),
                    std::invalid_argument);

    curve.x_lo = 0.5;  // overlap
    CHECK_THROWS_AS(PiecewiseUtility(0.0, false, {flat, curve}, {0.0}),
                    std::invalid_argument);

    // decreasing segment
    Segment down;
    down.kind = SegmentKind::affine;
    down.b = -1.0;
    down.x_lo = 0.0;
    down.x_hi = 1.0;
    curve.x_lo = 1.0;
    CHECK_THROWS_AS(PiecewiseUtility(0.0, false, {down, curve}, {0.0}),
                    std::invalid_argument);

    // bounded tail
    Segment cap;
    cap.kind = SegmentKind::exp_shifted;
    cap.b = -1.0;
    cap.p = -1.0;
    cap.x_lo = 0.0;
    cap.x_hi = kInf;
    CHECK_THROWS_AS(PiecewiseUtility(0.0, false, {cap}, {}), std::invalid_argument);
}

TEST_CASE("conjugate function V on the examples") {
    const EnvelopeBundle b(fixtures::flat_log());
    CHECK(b.conjugate_V(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(b.conjugate_V(2.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::fabs(b.conjugate_V(2.0)) < 1e-14);

    const EnvelopeBundle log_b(fixtures::pure_log());
    CHECK(log_b.conjugate_V(1.0) == doctest::Approx(-1.0).epsilon(1e-13));

    CHECK_THROWS_AS(b.conjugate_V(0.0), std::domain_error);
    CHECK_THROWS_AS(b.conjugate_V(-1.0), std::domain_error);
}

TEST_CASE("conjugate point I on the examples") {
    const EnvelopeBundle b(fixtures::flat_log());
    CHECK(b.point_I(0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.point_I(3.0) == 0.0);

    const EnvelopeBundle log_b(fixtures::pure_log());
    CHECK(log_b.point_I(4.0) == doctest::Approx(0.25).epsilon(1e-13));

    CHECK_THROWS_AS(b.point_I(-2.0), std::domain_error);
}

TEST_CASE("jump set of the flat-then-log example is {(1, 1, 0)}") {
    const EnvelopeBundle b(fixtures::flat_log());
    REQUIRE(b.jump_set().size() == 1);
    CHECK(b.jump_set()[0].y == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b.jump_set()[0].I_left == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.jump_set()[0].I_right == doctest::Approx(0.0).epsilon(1e-9));

    REQUIRE(b.chord_intervals().size() == 1);
    CHECK(b.chord_intervals()[0].lo == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(b.chord_intervals()[0].hi == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("concave utility has no jumps") {
    const EnvelopeBundle b(fixtures::pure_log());
    CHECK(b.jump_set().empty());
    CHECK(b.chord_intervals().empty());
}

TEST_CASE("two-piece reward utility: one jump, verified against brute force") {
    const PiecewiseUtility u = fixtures::two_piece();
    const EnvelopeBundle b(u);

    // The floor at 0 and the reward point (e^2, 3) span a single chord of
    // slope 3/e^2 that dominates the whole log branch in between.
    const double y_star = 3.0 / e2;
    REQUIRE(b.jump_set().size() == 1);
    CHECK(b.jump_set()[0].y == doctest::Approx(y_star).epsilon(1e-12));
    CHECK(b.jump_set()[0].I_left == doctest::Approx(e2).epsilon(1e-12));
    CHECK(b.jump_set()[0].I_right == doctest::Approx(0.0).epsilon(1e-12));

    REQUIRE(b.chord_intervals().size() == 1);
    CHECK(b.chord_intervals()[0].lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b.chord_intervals()[0].hi == doctest::Approx(e2).epsilon(1e-12));

    // I is continuous across the kink at y = e^-2 where the reward branch
    // hands over to the jump point.
    const double kink = std::exp(-2.0);
    CHECK(b.point_I(kink * (1.0 - 1e-9)) ==
          doctest::Approx(b.point_I(kink * (1.0 + 1e-9))).epsilon(1e-6));

    // brute-force argmax agrees across the jump, the kink and the flats
    for (double y : {0.9 * kink, 1.1 * kink, 0.3, 0.95 * y_star, 1.05 * y_star, 2.0}) {
        const double bf = fixtures::brute_force_argmax(u, y, 60.0, 1000000);
        CHECK(std::fabs(b.point_I(y) - bf) <= 6.5e-5);  // grid resolution
    }
}

TEST_CASE("generalized inverse Lambda") {
    const EnvelopeBundle b(fixtures::flat_log());
    CHECK(b.lambda_T(4.0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(b.lambda_T(0.5) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b.lambda_T(0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(b.lambda_T(-0.5), std::domain_error);

    // generalized-inverse inequality off the jump set
    for (double y : {0.1, 0.3, 0.7, 2.0, 5.0})
        CHECK(b.lambda_T(b.point_I(y)) <= y * (1.0 + 1e-9));
}

TEST_CASE("envelope values on the flat-then-log example") {
    const EnvelopeBundle b(fixtures::flat_log());
    CHECK(b.envelope_value(0.5) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(b.envelope_value(std::exp(1.0)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(b.envelope_value(-2.0) == -kInf);
}

TEST_CASE("envelope matches the sampled-hull oracle on the two-piece utility") {
    const PiecewiseUtility u = fixtures::two_piece();
    const EnvelopeBundle b(u);
    const fixtures::SampledHull hull(u, 50.0, 1000000);
    auto gen = fixtures::rng(7);
    std::uniform_real_distribution<double> dist(0.01, 20.0);
    for (int i = 0; i < 100; ++i) {
        const double x = dist(gen);
        CHECK(std::fabs(b.envelope_value(x) - hull(x)) <= 1e-8 * (1.0 + std::fabs(hull(x))));
    }
}

TEST_CASE("derivative of the continuous part of I") {
    const EnvelopeBundle b(fixtures::flat_log());
    CHECK(b.Ictn_prime(0.5) == doctest::Approx(-4.0).epsilon(1e-12));
    CHECK(b.Ictn_prime(2.0) == 0.0);

    // finite differences of I off the jumps
    for (double y : {0.11, 0.4, 0.77, 1.5, 3.3}) {
        const double h = 1e-6 * y;
        const double fd = (b.point_I(y + h) - b.point_I(y - h)) / (2.0 * h);
        const double an = b.Ictn_prime(y);
        CHECK(std::fabs(fd - an) <= 1e-6 * (1.0 + std::fabs(an)));
    }
}

TEST_CASE("Fenchel identity U(I(y)) - y I(y) = V(y) on a log-spaced sweep") {
    for (const PiecewiseUtility& u :
         {fixtures::flat_log(), fixtures::pure_log(), fixtures::two_piece()}) {
        const EnvelopeBundle b(u);
        for (int i = 0; i < 1000; ++i) {
            const double y = 1e-6 * std::pow(1e12, i / 999.0);
            const double I = b.point_I(y);
            const double lhs = u.value(I) - y * I;
            CHECK(std::fabs(lhs - b.conjugate_V(y)) <= 1e-10 * (1.0 + std::fabs(lhs)));
        }
    }
}

TEST_CASE("I is non-increasing") {
    for (const PiecewiseUtility& u :
         {fixtures::flat_log(), fixtures::pure_log(), fixtures::two_piece()}) {
        const EnvelopeBundle b(u);
        double prev = kInf;
        for (int i = 0; i < 500; ++i) {
            const double y = 1e-4 * std::pow(1e8, i / 499.0);
            const double I = b.point_I(y);
            CHECK(I <= prev * (1.0 + 1e-12) + 1e-12);
            prev = I;
        }
    }
}

TEST_CASE("envelope dominates, is concave, and is affine exactly on chords") {
    for (const PiecewiseUtility& u : {fixtures::flat_log(), fixtures::two_piece()}) {
        const EnvelopeBundle b(u);
        auto gen = fixtures::rng(11);
        std::uniform_real_distribution<double> dist(u.L(), 25.0);

        for (int i = 0; i < 10000; ++i) {
            const double x = dist(gen);
            CHECK(b.envelope_value(x) >= u.value(x) - 1e-12);
        }
        for (int i = 0; i < 300; ++i) {
            const double x1 = dist(gen), x2 = dist(gen);
            const double mid = b.envelope_value(0.5 * (x1 + x2));
            const double avg = 0.5 * (b.envelope_value(x1) + b.envelope_value(x2));
            CHECK(mid >= avg - 1e-10);
        }

        // U** = U off the chords (sampling away from chord closures)
        for (int i = 0; i < 2000; ++i) {
            const double x = dist(gen);
            bool near_chord = false;
            for (const ChordInterval& ch : b.chord_intervals())
                near_chord = near_chord || (x > ch.lo - 1e-6 && x < ch.hi + 1e-6);
            if (near_chord) continue;
            CHECK(std::fabs(b.envelope_value(x) - u.value(x)) <=
                  1e-10 * (1.0 + std::fabs(u.value(x))));
        }

        // affinity: vanishing second difference inside each chord
        for (const ChordInterval& ch : b.chord_intervals()) {
            const double w = ch.hi - ch.lo;
            for (int i = 1; i < 20; ++i) {
                const double x = ch.lo + w * i / 20.0;
                const double h = w / 50.0;
                const double second = b.envelope_value(x + h) - 2.0 * b.envelope_value(x) +
                                      b.envelope_value(x - h);
                CHECK(std::fabs(second) <= 1e-10 * (1.0 + std::fabs(b.envelope_value(x))));
            }
        }

        // strict monotonicity
        double prev_x = u.L() + 1e-3;
        double prev_v = b.envelope_value(prev_x);
        for (int i = 0; i < 200; ++i) {
            const double x = prev_x + 0.1;
            const double v = b.envelope_value(x);
            CHECK(v > prev_v);
            prev_x = x;
            prev_v = v;
        }
    }
}

TEST_CASE("biconjugate fixpoint: the envelope is its own envelope") {
    for (const PiecewiseUtility& u : {fixtures::flat_log(), fixtures::two_piece()}) {
        const EnvelopeBundle b(u);
        const PiecewiseUtility env_u = b.envelope_as_utility();
        const EnvelopeBundle b2(env_u);
        // the rebuilt envelope dominates itself nowhere (I may still jump
        // across its affine stretches)
        CHECK(b2.chord_intervals().empty());
        auto gen = fixtures::rng(13);
        std::uniform_real_distribution<double> dist(u.L() + 1e-6, 30.0);
        for (int i = 0; i < 400; ++i) {
            const double x = dist(gen);
            CHECK(std::fabs(b2.envelope_value(x) - b.envelope_value(x)) <=
                  1e-9 * (1.0 + std::fabs(b.envelope_value(x))));
            CHECK(std::fabs(env_u.value(x) - b.envelope_value(x)) <=
                  1e-9 * (1.0 + std::fabs(b.envelope_value(x))));
        }
    }
}

TEST_CASE("assumption validation") {
    SUBCASE("flat-then-log: monotone, usc warning at x=1, M about 1") {
        const PiecewiseUtility u = fixtures::flat_log();
        const EnvelopeBundle b(u);
        const ValidationReport r = validate_assumptions(u, b);
        CHECK(r.worst() == CheckLevel::warn);
        bool saw_usc_warning = false;
        for (const CheckEntry& e : r.entries)
            if (e.name.rfind("usc.", 0) == 0 && e.level == CheckLevel::warn)
                saw_usc_warning = true;
        CHECK(saw_usc_warning);
        REQUIRE(r.has_growth_estimate);
        CHECK(r.M_hat == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.C0_hat == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("pure log: all pass, M about 1") {
        const PiecewiseUtility u = fixtures::pure_log();
        const EnvelopeBundle b(u);
        const ValidationReport r = validate_assumptions(u, b);
        CHECK(r.worst() == CheckLevel::pass);
        REQUIRE(r.has_growth_estimate);
        CHECK(r.M_hat == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("two-piece reward: usc holds everywhere") {
        const PiecewiseUtility u = fixtures::two_piece();
        const EnvelopeBundle b(u);
        const ValidationReport r = validate_assumptions(u, b);
        for (const CheckEntry& e : r.entries)
            if (e.name.rfind("usc.", 0) == 0) CHECK(e.level == CheckLevel::pass);
    }
}
