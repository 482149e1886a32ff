#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rotnum/maps.hpp"

using namespace rotnum;

namespace {

std::mt19937_64 rng(20240818);

double random_double(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

} // namespace

TEST_CASE("parameter range checks") {
    CHECK_THROWS_AS(MapDescriptor::arnold(Interval(0.2), Interval(0.2)), MapError);
    CHECK_NOTHROW(MapDescriptor::arnold(Interval(0.2), Interval(0.159154943)));
    CHECK_THROWS_AS(MapDescriptor::delayed_logistic(Interval(2.5)), MapError);
    CHECK_THROWS_AS(MapDescriptor::delayed_logistic(Interval(1.9)), MapError);
    CHECK_NOTHROW(MapDescriptor::delayed_logistic(Interval(2.5), /*unsafe=*/true));
    CHECK_NOTHROW(MapDescriptor::delayed_logistic(Interval(2.1)));
}

TEST_CASE("lift is a degree-one lift") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.22), Interval(0.159));
    for (int k = 0; k < 200; ++k) {
        double x = random_double(-5.0, 5.0);
        Interval a = m.lift_eval(Interval(x + 1.0));
        Interval b = add(m.lift_eval(Interval(x)), Interval(1.0));
        // both enclose the same real value, so they must overlap
        CHECK(intersect(a, b).has_value());
    }
    // F(0) lands in [0, 1)
    Interval f0 = m.lift_eval(Interval(0.0));
    CHECK(f0.lo >= 0.0);
    CHECK(f0.hi < 1.0);
}

TEST_CASE("lift is increasing when 2 pi |epsilon| < 1") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.22), Interval(0.15));
    Interval d = m.lift_deriv(Interval(0.0, 1.0));
    CHECK(d.lo > 0.0);
    for (int k = 0; k < 200; ++k) {
        double a = random_double(0.0, 1.0);
        double b = a + random_double(1e-6, 0.1);
        CHECK(m.lift_eval(Interval(b)).hi > m.lift_eval(Interval(a)).lo);
    }
}

TEST_CASE("mean value containment of the derivative") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.22), Interval(0.159));
    for (int k = 0; k < 500; ++k) {
        double a = random_double(-2.0, 2.0);
        double b = a + random_double(1e-8, 0.3);
        Interval diff = sub(m.lift_eval(Interval(b)), m.lift_eval(Interval(a)));
        Interval slope = mul(m.lift_deriv(Interval(a, b)), Interval(b - a));
        // (F(b)-F(a)) = F'(xi)(b-a) for some xi, so the enclosures overlap
        CHECK(intersect(diff, slope).has_value());
    }
}

TEST_CASE("lift_residual encloses F(prev) - cur and avoids cancellation") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.22), Interval(0.01));
    for (int k = 0; k < 500; ++k) {
        double prev = random_double(-50000.0, 50000.0);
        double cur = prev + random_double(-1.0, 1.0);
        Interval r = m.lift_residual(prev, cur);
        Interval direct = sub(m.lift_eval(Interval(prev)), Interval(cur));
        CHECK(intersect(r, direct).has_value());
    }
    // at a lift coordinate ~4.4e4 the direct difference rounds at
    // ulp(44000) ~ 7e-12; the residual form stays at ~1e-16 resolution
    Interval r = m.lift_residual(44000.125, 44000.375);
    CHECK(r.hi - r.lo < 1e-14);
}

TEST_CASE("approximate lift evaluation tracks the interval lift") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.45), Interval(0.159));
    for (int k = 0; k < 500; ++k) {
        double x = random_double(-100.0, 100.0);
        double fx = m.lift_eval_approx(x);
        Interval F = m.lift_eval(Interval(x));
        CHECK(std::abs(fx - mid(F)) < 1e-10);
    }
}

TEST_CASE("delayed logistic fixed point and Jacobian") {
    MapDescriptor m = MapDescriptor::delayed_logistic(Interval(2.1));
    PlanePoint c = m.rotation_center();
    PlanePoint fc = m.plane_eval(c);
    // the center is the interior fixed point
    CHECK(intersect(fc.x, c.x).has_value());
    CHECK(intersect(fc.y, c.y).has_value());

    // finite-difference check of the Jacobian at a sample point
    double x = 0.5, y = 0.55, h = 1e-7;
    PlaneMatrix J = m.plane_jacobian(PlanePoint{Interval(x), Interval(y)});
    auto [fx0, fy0] = m.plane_eval_approx(x, y);
    auto [fx1, fy1] = m.plane_eval_approx(x + h, y);
    auto [fx2, fy2] = m.plane_eval_approx(x, y + h);
    CHECK(std::abs((fx1 - fx0) / h - mid(J.a11)) < 1e-5);
    CHECK(std::abs((fy1 - fy0) / h - mid(J.a21)) < 1e-5);
    CHECK(std::abs((fx2 - fx0) / h - mid(J.a12)) < 1e-5);
    CHECK(std::abs((fy2 - fy0) / h - mid(J.a22)) < 1e-5);
}

TEST_CASE("angle observable is continuous along a small step") {
    MapDescriptor m = MapDescriptor::delayed_logistic(Interval(2.1));
    PlanePoint c = m.rotation_center();
    double r = 0.05;
    Interval prev(0.0);
    prev = m.angle_observable(PlanePoint{Interval(mid(c.x) + r), Interval(mid(c.y))}, prev);
    double total0 = mid(prev);
    // walk the circle in 100 steps; each lifted increment stays small and the
    // total winding comes back after a full turn
    for (int k = 1; k <= 100; ++k) {
        double t = 6.283185307179586 * k / 100.0;
        PlanePoint p{Interval(mid(c.x) + r * std::cos(t)), Interval(mid(c.y) + r * std::sin(t))};
        Interval cur = m.angle_observable(p, prev);
        CHECK(std::abs(mid(cur) - mid(prev)) < 0.5);
        prev = cur;
    }
    CHECK(std::abs(std::abs(mid(prev) - total0) - 1.0) < 1e-6);
}

TEST_CASE("1-D operations reject 2-D maps and vice versa") {
    MapDescriptor dlm = MapDescriptor::delayed_logistic(Interval(2.1));
    CHECK_THROWS_AS(dlm.lift_eval(Interval(0.0)), MapError);
    MapDescriptor arn = MapDescriptor::arnold(Interval(0.2), Interval(0.01));
    CHECK_THROWS_AS(arn.plane_eval(PlanePoint{Interval(0.0), Interval(0.0)}), MapError);
}

TEST_CASE("interval_from_decimal") {
    Interval half = interval_from_decimal("0.5");
    CHECK(half.lo == 0.5);
    CHECK(half.hi == 0.5);
    Interval tenth = interval_from_decimal("0.1");
    CHECK(tenth.hi - tenth.lo <= std::ldexp(1.0, -55));
    long double truth = 0.1L;
    CHECK(static_cast<long double>(tenth.lo) <= truth);
    CHECK(truth <= static_cast<long double>(tenth.hi));
    Interval neg = interval_from_decimal("-0.159154943");
    CHECK(static_cast<long double>(neg.lo) <= -0.159154943L);
    CHECK(-0.159154943L <= static_cast<long double>(neg.hi));
}
