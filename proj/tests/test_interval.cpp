#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rotnum/interval.hpp"

using namespace rotnum;

namespace {

std::mt19937_64 rng(20240817);

double random_double(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

Interval random_interval(double lo, double hi, double max_width) {
    double a = random_double(lo, hi);
    double w = random_double(0.0, max_width);
    return Interval(a, a + w);
}

double sample(const Interval& v) {
    double t = random_double(0.0, 1.0);
    double p = v.lo + t * (v.hi - v.lo);
    return std::clamp(p, v.lo, v.hi);
}

Interval widen(const Interval& v) {
    double pad = random_double(0.0, 0.5);
    return Interval(v.lo - pad, v.hi + pad);
}

const long double kTwoPiL = 6.283185307179586476925286766559L;

// Oracle for sin(2 pi x): reduce mod 1 exactly in binary64 first, so the
// long double argument rounding stays far below the enclosure's padding.
long double sin2pi_oracle(double x) {
    double t = x - std::floor(x);   // exact for |x| < 2^52
    return sinl(kTwoPiL * static_cast<long double>(t));
}

} // namespace

TEST_CASE("exact dyadic arithmetic stays a point") {
    Interval a(0.25), b(0.5);
    Interval s = add(a, b);
    CHECK(s.lo == 0.75);
    CHECK(s.hi == 0.75);
    Interval p = mul(Interval(1.5), Interval(2.0));
    CHECK(p.lo == 3.0);
    CHECK(p.hi == 3.0);
    Interval q = div(Interval(1.0), Interval(4.0));
    CHECK(q.lo == 0.25);
    CHECK(q.hi == 0.25);
}

TEST_CASE("inexact operations are outward rounded") {
    Interval s = add(Interval(0.1), Interval(0.2));
    long double exact = 0.1L + 0.2L;   // sum of the two binary64 points
    long double xl = static_cast<long double>(0.1) + static_cast<long double>(0.2);
    CHECK(static_cast<long double>(s.lo) <= xl);
    CHECK(xl <= static_cast<long double>(s.hi));
    CHECK(s.hi - s.lo <= 2.0 * std::ldexp(1.0, -53));
    (void)exact;

    Interval t = div(Interval(1.0), Interval(3.0));
    long double third = 1.0L / 3.0L;
    CHECK(static_cast<long double>(t.lo) < third);
    CHECK(third < static_cast<long double>(t.hi));
}

TEST_CASE("basic predicates") {
    Interval a(1.0, 2.0), b(1.5, 3.0);
    CHECK(contains(a, 1.0));
    CHECK(contains(a, 2.0));
    CHECK_FALSE(contains(a, 2.5));
    CHECK(contains(hull(a, b), 3.0));
    auto i = intersect(a, b);
    REQUIRE(i.has_value());
    CHECK(i->lo == 1.5);
    CHECK(i->hi == 2.0);
    CHECK_FALSE(intersect(Interval(0.0, 1.0), Interval(2.0, 3.0)).has_value());
    CHECK(strictly_inside(Interval(1.1, 1.9), a));
    CHECK_FALSE(strictly_inside(a, a));
    CHECK(mid(a) == 1.5);
    CHECK(rad(a) == 0.5);
}

TEST_CASE("invalid construction throws") {
    CHECK_THROWS_AS(Interval(2.0, 1.0), IntervalError);
    CHECK_THROWS_AS(Interval(std::nan("")), IntervalError);
    CHECK_THROWS_AS(div(Interval(1.0), Interval(-1.0, 1.0)), IntervalError);
}

TEST_CASE("point containment for arithmetic ops (random)") {
    for (int k = 0; k < 10000; ++k) {
        Interval A = random_interval(-10.0, 10.0, 2.0);
        Interval B = random_interval(-10.0, 10.0, 2.0);
        double a = sample(A), b = sample(B);
        long double al = a, bl = b;

        Interval s = add(A, B);
        CHECK(static_cast<long double>(s.lo) <= al + bl);
        CHECK(al + bl <= static_cast<long double>(s.hi));

        Interval d = sub(A, B);
        CHECK(static_cast<long double>(d.lo) <= al - bl);
        CHECK(al - bl <= static_cast<long double>(d.hi));

        Interval p = mul(A, B);
        CHECK(static_cast<long double>(p.lo) <= al * bl);
        CHECK(al * bl <= static_cast<long double>(p.hi));

        if (!contains(B, 0.0)) {
            Interval q = div(A, B);
            CHECK(static_cast<long double>(q.lo) <= al / bl);
            CHECK(al / bl <= static_cast<long double>(q.hi));
        }
    }
}

TEST_CASE("inclusion isotonicity (random)") {
    for (int k = 0; k < 10000; ++k) {
        Interval A = random_interval(-5.0, 5.0, 1.0);
        Interval B = random_interval(-5.0, 5.0, 1.0);
        Interval A2 = widen(A), B2 = widen(B);
        CHECK(subset(add(A, B), add(A2, B2)));
        CHECK(subset(sub(A, B), sub(A2, B2)));
        CHECK(subset(mul(A, B), mul(A2, B2)));
        if (!contains(B2, 0.0)) CHECK(subset(div(A, B), div(A2, B2)));
        CHECK(subset(sin_2pi(A), sin_2pi(A2)));
        CHECK(subset(cos_2pi(A), cos_2pi(A2)));
    }
}

TEST_CASE("two_pi encloses the true constant") {
    Interval t = two_pi();
    CHECK(static_cast<long double>(t.lo) < kTwoPiL);
    CHECK(kTwoPiL < static_cast<long double>(t.hi));
    CHECK(t.hi - t.lo <= 2.0 * std::ldexp(1.0, -50));
}

TEST_CASE("sin_2pi point containment (random)") {
    for (int k = 0; k < 10000; ++k) {
        double x = random_double(-100.0, 100.0);
        Interval s = sin_2pi(Interval(x));
        long double truth = sin2pi_oracle(x);
        CHECK(static_cast<long double>(s.lo) <= truth);
        CHECK(truth <= static_cast<long double>(s.hi));
        CHECK(s.lo >= -1.0);
        CHECK(s.hi <= 1.0);
    }
}

TEST_CASE("sin_2pi critical points and wide arguments") {
    CHECK(sin_2pi(Interval(0.2, 0.3)).hi == 1.0);
    CHECK(sin_2pi(Interval(0.7, 0.8)).lo == -1.0);
    Interval wide = sin_2pi(Interval(0.0, 2.5));
    CHECK(wide.lo == -1.0);
    CHECK(wide.hi == 1.0);
    CHECK(contains(sin_2pi(Interval(0.25)), 1.0));
    CHECK(contains(cos_2pi(Interval(0.0)), 1.0));
    // near-zero values at integers
    Interval z = sin_2pi(Interval(3.0));
    CHECK(std::abs(z.lo) < 1e-14);
    CHECK(std::abs(z.hi) < 1e-14);
}

TEST_CASE("sin_2pi set containment (random subintervals)") {
    for (int k = 0; k < 2000; ++k) {
        Interval X = random_interval(-3.0, 3.0, 0.8);
        Interval s = sin_2pi(X);
        for (int j = 0; j < 5; ++j) {
            double x = sample(X);
            long double truth = sin2pi_oracle(x);
            CHECK(static_cast<long double>(s.lo) <= truth);
            CHECK(truth <= static_cast<long double>(s.hi));
        }
    }
}

TEST_CASE("atan2_circle basics") {
    CHECK(contains(atan2_circle(Interval(0.0), Interval(1.0)), 0.0));
    CHECK(contains(atan2_circle(Interval(1.0), Interval(0.0)), 0.25));
    CHECK(contains(atan2_circle(Interval(0.0), Interval(-1.0, -0.5)), 0.5));
    CHECK_THROWS_AS(atan2_circle(Interval(-1.0, 1.0), Interval(-1.0, 1.0)), IntervalError);
}

TEST_CASE("atan2_circle is connected across the branch cut") {
    // rectangle straddling the negative x axis: the enclosure must be one
    // short interval around +-1/2 turn, not a wrap-around of width ~1
    Interval t = atan2_circle(Interval(-0.1, 0.1), Interval(-2.0, -1.0));
    CHECK(t.hi - t.lo < 0.2);
    CHECK((contains(t, 0.5) || contains(t, -0.5)));
}

TEST_CASE("atan2_circle point containment (random)") {
    for (int k = 0; k < 5000; ++k) {
        Interval X = random_interval(-4.0, 4.0, 0.3);
        Interval Y = random_interval(-4.0, 4.0, 0.3);
        if (contains(X, 0.0) && contains(Y, 0.0)) continue;
        Interval t = atan2_circle(Y, X);
        double x = sample(X), y = sample(Y);
        long double turns = atan2l(y, x) / kTwoPiL;
        // the result may sit on any branch; shift the truth to the nearest
        long double best = turns;
        long double c = static_cast<long double>(mid(t));
        best += roundl(c - turns);
        CHECK(static_cast<long double>(t.lo) <= best);
        CHECK(best <= static_cast<long double>(t.hi));
    }
}
