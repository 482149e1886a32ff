#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rotnum/maps.hpp"
#include "rotnum/rotation.hpp"
#include "rotnum/shooting.hpp"

using namespace rotnum;

TEST_CASE("rigid rotation orbit certification against an exact oracle") {
    const double alpha = 0.123456789;   // nearest binary64; the true orbit is i*alpha
    MapDescriptor m = MapDescriptor::rigid(Interval(alpha));
    auto approx = approximate_orbit(m, 0.0, 1000);
    OrbitEnclosure orbit = newton_refine(m, 0.0, approx);
    REQUIRE(orbit.boxes.size() == 1000);
    for (std::size_t i = 0; i < orbit.boxes.size(); ++i) {
        // exact in long double: 53-bit alpha times i <= 1000 fits in 64 bits
        long double truth = static_cast<long double>(i + 1) * static_cast<long double>(alpha);
        CHECK(static_cast<long double>(orbit.boxes[i].lo) <= truth);
        CHECK(truth <= static_cast<long double>(orbit.boxes[i].hi));
        CHECK(width_up(orbit.boxes[i]) <= 1e-12);
    }
}

TEST_CASE("arnold orbit certification is sound on short orbits") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.22), Interval(0.159));
    auto approx = approximate_orbit(m, 0.0, 20);
    OrbitEnclosure orbit = newton_refine(m, 0.0, approx);
    // cross-check against naive interval iteration: both enclose the truth
    auto direct = iterate_interval(m, Interval(0.0), 20);
    for (std::size_t i = 0; i < 20; ++i)
        CHECK(intersect(orbit.boxes[i], direct[i]).has_value());
    // the shooting boxes satisfy the orbit relation F(box_i) meets box_{i+1}
    Interval prev(0.0);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(intersect(m.lift_eval(prev), orbit.boxes[i]).has_value());
        prev = orbit.boxes[i];
    }
}

TEST_CASE("a corrupted approximate orbit is rejected") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.22), Interval(0.159));
    auto approx = approximate_orbit(m, 0.0, 1000);
    approx[500] += 0.1;
    CHECK_THROWS_AS(newton_refine(m, 0.0, approx), ShootingError);
}

TEST_CASE("tighten never widens a certified orbit") {
    MapDescriptor m = MapDescriptor::arnold(Interval(0.45), Interval(0.159));
    auto approx = approximate_orbit(m, 0.0, 500);
    OrbitEnclosure orbit = newton_refine(m, 0.0, approx);
    auto before = orbit.boxes;
    tighten(m, orbit, approx);
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(subset(orbit.boxes[i], before[i]));
}

TEST_CASE("periodic verification certifies a 1/7 cycle") {
    MapDescriptor m = MapDescriptor::arnold(interval_from_decimal("0.21"),
                                            interval_from_decimal("0.159"));
    auto [cand, err] = detail::periodic_candidate_1d(m, 7);
    REQUIRE(err < 1e-9);
    PeriodicCertificate cert = verify_periodic(m, cand, 7);
    CHECK(cert.q == 7);
    CHECK(cert.p == 1);
    REQUIRE(cert.orbit.size() == 7);
    // the certified points follow each other under the map (mod 1)
    for (std::size_t j = 0; j < 7; ++j) {
        Interval f = m.lift_eval(cert.orbit[j]);
        Interval next = cert.orbit[(j + 1) % 7];
        double k = std::nearbyint(mid(f) - mid(next));
        CHECK(intersect(sub(f, Interval(k)), next).has_value());
    }
    for (const Interval& b : cert.orbit) CHECK(width_up(b) < 1e-9);
}

TEST_CASE("rigid rotation periodic system is singular") {
    // F' == 1 makes the cyclic Newton matrix singular; the verifier must
    // report that instead of certifying
    MapDescriptor m = MapDescriptor::rigid(Interval(0.25));
    std::vector<double> cand{0.1, 0.35, 0.6, 0.85};
    try {
        verify_periodic(m, cand, 4);
        FAIL("expected a singular system");
    } catch (const ShootingError& e) {
        CHECK(e.kind() == ShootingFailure::SingularSystem);
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }
}

TEST_CASE("periodic verification rejects a wrong period") {
    MapDescriptor m = MapDescriptor::arnold(interval_from_decimal("0.21"),
                                            interval_from_decimal("0.159"));
    auto [cand, err] = detail::periodic_candidate_1d(m, 7);
    REQUIRE(err < 1e-9);
    cand.pop_back();
    CHECK_THROWS_AS(verify_periodic(m, cand, 7), ShootingError);
}

TEST_CASE("plane shooting agrees with the framed direct enclosure") {
    MapDescriptor m = MapDescriptor::delayed_logistic(interval_from_decimal("2.1"));
    PlanePoint c = m.rotation_center();
    double x = mid(c.x) + 0.01, y = mid(c.y);
    for (int i = 0; i < 4096; ++i) {
        auto [nx, ny] = m.plane_eval_approx(x, y);
        x = nx; y = ny;
    }
    const std::size_t n = 40;
    auto approx = approximate_plane_orbit(m, x, y, n);
    PlaneOrbitEnclosure shot = newton_refine_plane(m, x, y, approx);
    PlaneCurveEnclosure tube(m, x, y);
    tube.extend(n);
    REQUIRE(shot.boxes.size() == n);
    REQUIRE(tube.boxes().size() >= n);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(intersect(shot.boxes[i].x, tube.boxes()[i].x).has_value());
        CHECK(intersect(shot.boxes[i].y, tube.boxes()[i].y).has_value());
    }
}

TEST_CASE("framed direct enclosure stays tight on long orbits") {
    MapDescriptor m = MapDescriptor::delayed_logistic(interval_from_decimal("2.1"));
    PlanePoint c = m.rotation_center();
    double x = mid(c.x) + 0.01, y = mid(c.y);
    for (int i = 0; i < 4096; ++i) {
        auto [nx, ny] = m.plane_eval_approx(x, y);
        x = nx; y = ny;
    }
    PlaneCurveEnclosure tube(m, x, y);
    tube.extend(20000);
    double maxw = 0.0;
    for (const PlanePoint& b : tube.boxes())
        maxw = std::max(maxw, std::max(width_up(b.x), width_up(b.y)));
    CHECK(maxw < 1e-9);
}

TEST_CASE("dense interval elimination solves a known system") {
    // [2 1; 1 3] h = [3; 5] has the exact solution h = (4/5, 7/5)
    std::vector<Interval> A{Interval(2.0), Interval(1.0), Interval(1.0), Interval(3.0)};
    std::vector<Interval> g{Interval(3.0), Interval(5.0)};
    auto h = detail::solve_dense(A, g);
    CHECK(contains(h[0], 0.8));
    CHECK(contains(h[1], 1.4));
    CHECK(width_up(h[0]) < 1e-14);
    CHECK(width_up(h[1]) < 1e-14);
}
