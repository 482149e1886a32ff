#pragma once

// Certification of long finite orbits via the interval Newton operator
// applied to the multiple-shooting system, and certification of periodic
// orbits via the cyclic variant.
//
// The shooting system for an n-step orbit of a lift F starting at the exact
// point x0 is G_i(z) = F(z_{i-1}) - z_i with a lower-bidiagonal Jacobian
// (diagonal -1, subdiagonal F').  Forward substitution of
//     h_1 = G_1(x),   h_i = G_i(x) + F'(Z_{i-1}) h_{i-1}
// solves J h = -G(x), so the interval Newton image is N(Z) = x + h.  Strict
// containment of N(Z) in the interior of Z certifies that a true orbit
// passes through every box (existence and uniqueness).

#include <cstdint>
#include <vector>
#include <stdexcept>
#include <string>

#include "rotnum/interval.hpp"
#include "rotnum/maps.hpp"

namespace rotnum {

enum class ShootingFailure { NoContraction, EmptyIntersection, SingularSystem };

class ShootingError : public std::runtime_error {
public:
    ShootingError(ShootingFailure kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ShootingFailure kind() const { return kind_; }
private:
    ShootingFailure kind_;
};

struct ShootingOptions {
    double initial_radius = 1e-12;
    double max_radius = 1e-6;
    double inflation_factor = 10.0;
    int refine_passes = 3;
};

struct OrbitEnclosure {
    double x0 = 0.0;                  // exact initial point (lift coordinate)
    std::vector<Interval> boxes;      // boxes[i] contains F^{i+1}(x0)
};

struct PlaneOrbitEnclosure {
    double x0 = 0.0, y0 = 0.0;
    std::vector<PlanePoint> boxes;    // boxes[i] contains phi^{i+1}(p0)
};

struct PeriodicCertificate {
    std::uint64_t q = 0;              // period
    long long p = 0;                  // winding per period
    std::vector<Interval> orbit;      // 1-D: circle coordinates of the orbit
    std::vector<PlanePoint> plane_orbit;  // 2-D
    bool exact_return = false;        // certified by exact arithmetic, not Newton
};

// Plain floating-point iteration of the lift; no rigor claimed.  The
// iteration runs on the fractional coordinate with the integer winding kept
// separately, so the per-step rounding does not grow with the lift
// magnitude.
inline std::vector<double> approximate_orbit(const MapDescriptor& m, double x0, std::size_t n) {
    std::vector<double> pts;
    pts.reserve(n);
    double wind = std::floor(x0);
    double y = x0 - wind;
    for (std::size_t i = 0; i < n; ++i) {
        y = m.lift_eval_approx(y);
        double k = std::floor(y);
        y -= k;
        wind += k;
        pts.push_back(wind + y);
    }
    return pts;
}

namespace detail {

// One Newton pass around midpoints `approx` with current boxes `z`.
// Returns the candidate boxes N = approx - h; sets flags for the outcome.
inline bool newton_pass_1d(const MapDescriptor& m, double x0,
                           const std::vector<double>& approx,
                           const std::vector<Interval>& z,
                           std::vector<Interval>& out,
                           bool& empty) {
    const std::size_t n = approx.size();
    out.resize(n);
    bool contracted = true;
    empty = false;
    Interval h(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Interval residual = m.lift_residual(i == 0 ? x0 : approx[i - 1], approx[i]);
        if (i == 0) {
            h = residual;
        } else {
            h = add(residual, mul(m.lift_deriv(z[i - 1]), h));
        }
        Interval cand = add(Interval(approx[i]), h);
        if (!strictly_inside(cand, z[i])) contracted = false;
        auto isect = intersect(cand, z[i]);
        if (!isect) { empty = true; return false; }
        out[i] = *isect;
    }
    return contracted;
}

} // namespace detail

// Certify the orbit of x0 through the approximate points.  On success the
// i-th box contains the true iterate F^{i+1}(x0).
inline OrbitEnclosure newton_refine(const MapDescriptor& m, double x0,
                                    const std::vector<double>& approx,
                                    const ShootingOptions& opts = {}) {
    if (approx.empty()) throw ShootingError(ShootingFailure::NoContraction, "empty approximate orbit");
    const std::size_t n = approx.size();
    std::vector<Interval> z(n), cand(n);
    bool last_empty = false;
    for (double r = opts.initial_radius; r <= opts.max_radius; r *= opts.inflation_factor) {
        for (std::size_t i = 0; i < n; ++i)
            z[i] = Interval(detail::sub_down(approx[i], r), detail::add_up(approx[i], r));
        bool empty = false;
        if (detail::newton_pass_1d(m, x0, approx, z, cand, empty)) {
            z = cand;
            for (int pass = 0; pass < opts.refine_passes; ++pass) {
                if (!detail::newton_pass_1d(m, x0, approx, z, cand, empty)) break;
                z = cand;
            }
            OrbitEnclosure orbit;
            orbit.x0 = x0;
            orbit.boxes = std::move(z);
            return orbit;
        }
        // an empty intersection only rules out an orbit in this box; retry
        // wider, like a failed contraction
        last_empty = empty;
    }
    if (last_empty)
        throw ShootingError(ShootingFailure::EmptyIntersection,
                            "empty intersection: no orbit in the candidate boxes");
    throw ShootingError(ShootingFailure::NoContraction, "no contraction");
}

// One additional tightening pass on an already certified orbit.
inline void tighten(const MapDescriptor& m, OrbitEnclosure& orbit,
                    const std::vector<double>& approx) {
    std::vector<Interval> cand;
    bool empty = false;
    if (detail::newton_pass_1d(m, orbit.x0, approx, orbit.boxes, cand, empty))
        orbit.boxes = std::move(cand);
}

// --- 2-D (plane map) shooting; identical structure with 2x2 blocks ---

namespace detail {

struct Vec2 { Interval x, y; };

inline Vec2 mat_vec(const PlaneMatrix& A, const Vec2& v) {
    return Vec2{add(mul(A.a11, v.x), mul(A.a12, v.y)),
                add(mul(A.a21, v.x), mul(A.a22, v.y))};
}

inline bool newton_pass_2d(const MapDescriptor& m, double px, double py,
                           const std::vector<std::pair<double, double>>& approx,
                           const std::vector<PlanePoint>& z,
                           std::vector<PlanePoint>& out,
                           bool& empty) {
    const std::size_t n = approx.size();
    out.resize(n);
    bool contracted = true;
    empty = false;
    Vec2 h{Interval(0.0), Interval(0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        PlanePoint prev = i == 0
            ? PlanePoint{Interval(px), Interval(py)}
            : PlanePoint{Interval(approx[i - 1].first), Interval(approx[i - 1].second)};
        PlanePoint f = m.plane_eval(prev);
        Vec2 residual{sub(f.x, Interval(approx[i].first)), sub(f.y, Interval(approx[i].second))};
        if (i == 0) {
            h = residual;
        } else {
            Vec2 carried = mat_vec(m.plane_jacobian(z[i - 1]), h);
            h = Vec2{add(residual.x, carried.x), add(residual.y, carried.y)};
        }
        Interval cx = add(Interval(approx[i].first), h.x);
        Interval cy = add(Interval(approx[i].second), h.y);
        if (!strictly_inside(cx, z[i].x) || !strictly_inside(cy, z[i].y)) contracted = false;
        auto ix = intersect(cx, z[i].x);
        auto iy = intersect(cy, z[i].y);
        if (!ix || !iy) { empty = true; return false; }
        out[i] = PlanePoint{*ix, *iy};
    }
    return contracted;
}

} // namespace detail

inline std::vector<std::pair<double, double>> approximate_plane_orbit(
        const MapDescriptor& m, double x0, double y0, std::size_t n) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n);
    double x = x0, y = y0;
    for (std::size_t i = 0; i < n; ++i) {
        auto [nx, ny] = m.plane_eval_approx(x, y);
        x = nx; y = ny;
        pts.emplace_back(x, y);
    }
    return pts;
}

inline PlaneOrbitEnclosure newton_refine_plane(const MapDescriptor& m, double x0, double y0,
                                               const std::vector<std::pair<double, double>>& approx,
                                               const ShootingOptions& opts = {}) {
    if (approx.empty()) throw ShootingError(ShootingFailure::NoContraction, "empty approximate orbit");
    const std::size_t n = approx.size();
    std::vector<PlanePoint> z(n), cand(n);
    bool last_empty = false;
    for (double r = opts.initial_radius; r <= opts.max_radius; r *= opts.inflation_factor) {
        for (std::size_t i = 0; i < n; ++i)
            z[i] = PlanePoint{
                Interval(detail::sub_down(approx[i].first, r), detail::add_up(approx[i].first, r)),
                Interval(detail::sub_down(approx[i].second, r), detail::add_up(approx[i].second, r))};
        bool empty = false;
        if (detail::newton_pass_2d(m, x0, y0, approx, z, cand, empty)) {
            z = cand;
            for (int pass = 0; pass < opts.refine_passes; ++pass) {
                if (!detail::newton_pass_2d(m, x0, y0, approx, z, cand, empty)) break;
                z = cand;
            }
            PlaneOrbitEnclosure orbit;
            orbit.x0 = x0; orbit.y0 = y0;
            orbit.boxes = std::move(z);
            return orbit;
        }
        last_empty = empty;
    }
    if (last_empty)
        throw ShootingError(ShootingFailure::EmptyIntersection,
                            "empty intersection: no orbit in the candidate boxes");
    throw ShootingError(ShootingFailure::NoContraction, "no contraction");
}

inline void tighten_plane(const MapDescriptor& m, PlaneOrbitEnclosure& orbit,
                          const std::vector<std::pair<double, double>>& approx) {
    std::vector<PlanePoint> cand;
    bool empty = false;
    if (detail::newton_pass_2d(m, orbit.x0, orbit.y0, approx, orbit.boxes, cand, empty))
        orbit.boxes = std::move(cand);
}

// Rigorous plane-orbit enclosures by direct iteration with a QR-factored
// deviation frame (Lohner's method).  Axis-aligned boxes iterated under a
// rotating map inflate exponentially (the wrapping effect), which defeats
// both naive interval iteration and the 2-D shooting recursion for long
// orbits; carrying the deviation from a point center in a rotated frame
// follows the true (neutral) growth instead.  The initial point is exact,
// so containment is unconditional: boxes[i] encloses phi^{i+1}(p0).
//
// The step uses the exact second-order Taylor identity of the quadratic
// map: phi(c + d) = phi(c) + Dphi(c) d + (0, -lambda d_x d_y).
class PlaneCurveEnclosure {
public:
    PlaneCurveEnclosure(const MapDescriptor& m, double x0, double y0)
        : map_(m), cx_(x0), cy_(y0) {}

    const std::vector<PlanePoint>& boxes() const { return boxes_; }

    void extend(std::size_t n) {
        while (boxes_.size() < n) step();
    }

private:
    void step() {
        Interval cx(cx_), cy(cy_);
        auto [nx, ny] = map_.plane_eval_approx(cx_, cy_);
        PlanePoint image = map_.plane_eval(PlanePoint{cx, cy});
        Interval rx = sub(image.x, Interval(nx));
        Interval ry = sub(image.y, Interval(ny));
        PlaneMatrix J = map_.plane_jacobian(PlanePoint{cx, cy});
        // A = J * Q (interval times point frame)
        Interval a11 = add(mul(J.a11, Interval(q11_)), mul(J.a12, Interval(q21_)));
        Interval a12 = add(mul(J.a11, Interval(q12_)), mul(J.a12, Interval(q22_)));
        Interval a21 = add(mul(J.a21, Interval(q11_)), mul(J.a22, Interval(q21_)));
        Interval a22 = add(mul(J.a21, Interval(q12_)), mul(J.a22, Interval(q22_)));
        // world-frame deviation, for the exact quadratic correction
        Interval dx = add(mul(Interval(q11_), u1_), mul(Interval(q12_), u2_));
        Interval dy = add(mul(Interval(q21_), u1_), mul(Interval(q22_), u2_));
        Interval quad = neg(mul(map_.lambda(), mul(dx, dy)));
        // new frame: orthonormalize the midpoint of A
        double m11 = mid(a11), m21 = mid(a21);
        double norm = std::sqrt(m11 * m11 + m21 * m21);
        double p11 = 1.0, p21 = 0.0;
        if (norm > 0.0) { p11 = m11 / norm; p21 = m21 / norm; }
        double p12 = -p21, p22 = p11;
        // B = interval inverse of the new frame
        Interval det = sub(mul(Interval(p11), Interval(p22)), mul(Interval(p12), Interval(p21)));
        Interval b11 = div(Interval(p22), det), b12 = div(neg(Interval(p12)), det);
        Interval b21 = div(neg(Interval(p21)), det), b22 = div(Interval(p11), det);
        // u' = B r + (B A) u + B quad   (quad enters the second component)
        Interval c11 = add(mul(b11, a11), mul(b12, a21));
        Interval c12 = add(mul(b11, a12), mul(b12, a22));
        Interval c21 = add(mul(b21, a11), mul(b22, a21));
        Interval c22 = add(mul(b21, a12), mul(b22, a22));
        Interval n1 = add(add(mul(b11, rx), mul(b12, add(ry, quad))),
                          add(mul(c11, u1_), mul(c12, u2_)));
        Interval n2 = add(add(mul(b21, rx), mul(b22, add(ry, quad))),
                          add(mul(c21, u1_), mul(c22, u2_)));
        q11_ = p11; q12_ = p12; q21_ = p21; q22_ = p22;
        u1_ = n1; u2_ = n2;
        cx_ = nx; cy_ = ny;
        Interval bx = add(Interval(cx_), add(mul(Interval(q11_), u1_), mul(Interval(q12_), u2_)));
        Interval by = add(Interval(cy_), add(mul(Interval(q21_), u1_), mul(Interval(q22_), u2_)));
        boxes_.push_back(PlanePoint{bx, by});
    }

    const MapDescriptor& map_;
    double cx_, cy_;
    double q11_ = 1.0, q12_ = 0.0, q21_ = 0.0, q22_ = 1.0;
    Interval u1_{0.0}, u2_{0.0};
    std::vector<PlanePoint> boxes_;
};

// --- periodic orbits: cyclic shooting solved by dense interval elimination ---

namespace detail {

// Solve A h = g by Gaussian elimination with partial midpoint pivoting.
// A is dense (row-major, n x n).  Throws on a pivot containing zero.
inline std::vector<Interval> solve_dense(std::vector<Interval> A, std::vector<Interval> g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    auto at = [&](std::size_t r, std::size_t c) -> Interval& { return A[perm[r] * n + c]; };
    auto rhs = [&](std::size_t r) -> Interval& { return g[perm[r]]; };
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        double best_mag = std::abs(mid(at(col, col)));
        for (std::size_t r = col + 1; r < n; ++r) {
            double mag = std::abs(mid(at(r, col)));
            if (mag > best_mag) { best = r; best_mag = mag; }
        }
        std::swap(perm[col], perm[best]);
        Interval pivot = at(col, col);
        if (contains(pivot, 0.0))
            throw ShootingError(ShootingFailure::SingularSystem, "singular Newton system");
        for (std::size_t r = col + 1; r < n; ++r) {
            Interval factor = at(r, col);
            if (factor.lo == 0.0 && factor.hi == 0.0) continue;
            Interval ratio = div(factor, pivot);
            at(r, col) = Interval(0.0);
            for (std::size_t c = col + 1; c < n; ++c)
                at(r, c) = sub(at(r, c), mul(ratio, at(col, c)));
            rhs(r) = sub(rhs(r), mul(ratio, rhs(col)));
        }
    }
    std::vector<Interval> h(n);
    for (std::size_t r = n; r-- > 0;) {
        Interval acc = rhs(r);
        for (std::size_t c = r + 1; c < n; ++c)
            acc = sub(acc, mul(at(r, c), h[c]));
        h[r] = div(acc, at(r, r));
    }
    return h;
}

} // namespace detail

// Verify a period-q orbit of a 1-D circle map near the candidate circle
// points.  The cyclic system is g_j = F(x_j) - k_j - x_{j+1} with integer
// winding offsets k_j read from the candidate; p is their sum.
inline PeriodicCertificate verify_periodic(const MapDescriptor& m,
                                           const std::vector<double>& candidate,
                                           std::uint64_t q,
                                           const ShootingOptions& opts = {}) {
    if (q == 0 || candidate.size() != q)
        throw ShootingError(ShootingFailure::NoContraction, "candidate length must equal the period");
    const std::size_t n = q;
    std::vector<double> k(n);
    long long p = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t jn = (j + 1) % n;
        k[j] = std::nearbyint(m.lift_eval_approx(candidate[j]) - candidate[jn]);
        p += static_cast<long long>(k[j]);
    }
    std::vector<Interval> z(n), g(n);
    for (double r = opts.initial_radius; r <= opts.max_radius; r *= opts.inflation_factor) {
        for (std::size_t j = 0; j < n; ++j)
            z[j] = Interval(detail::sub_down(candidate[j], r), detail::add_up(candidate[j], r));
        // g at the midpoints, Jacobian over the boxes.
        std::vector<Interval> A(n * n, Interval(0.0));
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t jn = (j + 1) % n;
            g[j] = sub(sub(m.lift_eval(Interval(candidate[j])), Interval(k[j])),
                       Interval(candidate[jn]));
            A[j * n + j] = m.lift_deriv(z[j]);
            A[j * n + jn] = n == 1 ? sub(A[j * n + jn], Interval(1.0)) : Interval(-1.0);
        }
        std::vector<Interval> h = detail::solve_dense(std::move(A), g);
        bool contracted = true, empty = false;
        std::vector<Interval> cand(n);
        for (std::size_t j = 0; j < n; ++j) {
            Interval c = sub(Interval(candidate[j]), h[j]);
            if (!strictly_inside(c, z[j])) contracted = false;
            auto isect = intersect(c, z[j]);
            if (!isect) { empty = true; break; }
            cand[j] = *isect;
        }
        if (empty)
            throw ShootingError(ShootingFailure::EmptyIntersection,
                                "empty intersection: no period-q orbit in the candidate box");
        if (contracted) {
            PeriodicCertificate cert;
            cert.q = q;
            cert.p = p;
            cert.orbit = std::move(cand);
            return cert;
        }
    }
    throw ShootingError(ShootingFailure::NoContraction, "no contraction");
}

// 2-D variant: verify a period-q orbit of the plane map near candidate
// planar points; p is read from the lifted angle winding of the certified
// orbit afterwards.
inline PeriodicCertificate verify_periodic_plane(const MapDescriptor& m,
                                                 const std::vector<std::pair<double, double>>& candidate,
                                                 std::uint64_t q,
                                                 const ShootingOptions& opts = {}) {
    if (q == 0 || candidate.size() != q)
        throw ShootingError(ShootingFailure::NoContraction, "candidate length must equal the period");
    const std::size_t n = q, dim = 2 * n;
    std::vector<PlanePoint> z(n);
    for (double r = opts.initial_radius; r <= opts.max_radius; r *= opts.inflation_factor) {
        for (std::size_t j = 0; j < n; ++j)
            z[j] = PlanePoint{
                Interval(detail::sub_down(candidate[j].first, r), detail::add_up(candidate[j].first, r)),
                Interval(detail::sub_down(candidate[j].second, r), detail::add_up(candidate[j].second, r))};
        std::vector<Interval> A(dim * dim, Interval(0.0)), g(dim);
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t jn = (j + 1) % n;
            PlanePoint f = m.plane_eval(PlanePoint{Interval(candidate[j].first), Interval(candidate[j].second)});
            g[2 * j] = sub(f.x, Interval(candidate[jn].first));
            g[2 * j + 1] = sub(f.y, Interval(candidate[jn].second));
            PlaneMatrix J = m.plane_jacobian(z[j]);
            A[(2 * j) * dim + 2 * j] = J.a11;
            A[(2 * j) * dim + 2 * j + 1] = J.a12;
            A[(2 * j + 1) * dim + 2 * j] = J.a21;
            A[(2 * j + 1) * dim + 2 * j + 1] = J.a22;
            for (int c = 0; c < 2; ++c) {
                std::size_t col = 2 * jn + static_cast<std::size_t>(c);
                std::size_t row = 2 * j + static_cast<std::size_t>(c);
                A[row * dim + col] = sub(A[row * dim + col], Interval(1.0));
            }
        }
        std::vector<Interval> h = detail::solve_dense(std::move(A), g);
        bool contracted = true, empty = false;
        std::vector<PlanePoint> cand(n);
        for (std::size_t j = 0; j < n; ++j) {
            Interval cx = sub(Interval(candidate[j].first), h[2 * j]);
            Interval cy = sub(Interval(candidate[j].second), h[2 * j + 1]);
            if (!strictly_inside(cx, z[j].x) || !strictly_inside(cy, z[j].y)) contracted = false;
            auto ix = intersect(cx, z[j].x);
            auto iy = intersect(cy, z[j].y);
            if (!ix || !iy) { empty = true; break; }
            cand[j] = PlanePoint{*ix, *iy};
        }
        if (empty)
            throw ShootingError(ShootingFailure::EmptyIntersection,
                                "empty intersection: no period-q orbit in the candidate box");
        if (contracted) {
            PeriodicCertificate cert;
            cert.q = q;
            cert.plane_orbit = std::move(cand);
            // winding per period from the lifted angle along the loop
            Interval theta(0.0);
            Interval first = m.angle_observable(cert.plane_orbit[0], Interval(0.0));
            theta = first;
            for (std::size_t j = 1; j < n; ++j)
                theta = m.angle_observable(cert.plane_orbit[j], theta);
            theta = m.angle_observable(cert.plane_orbit[0], theta);
            Interval wind = sub(theta, first);
            double pr = std::nearbyint(mid(wind));
            if (!(wind.lo > pr - 0.5 && wind.hi < pr + 0.5))
                throw ShootingError(ShootingFailure::NoContraction, "ambiguous winding");
            cert.p = static_cast<long long>(pr);
            return cert;
        }
    }
    throw ShootingError(ShootingFailure::NoContraction, "no contraction");
}

// Naive interval iteration (for cross-checks on short orbits).
inline std::vector<Interval> iterate_interval(const MapDescriptor& m, Interval start, std::size_t n) {
    std::vector<Interval> out;
    out.reserve(n);
    Interval x = start;
    for (std::size_t i = 0; i < n; ++i) {
        x = m.lift_eval(x);
        out.push_back(x);
    }
    return out;
}

} // namespace rotnum
