#pragma once

// Outward-rounded interval arithmetic over binary64.
//
// Endpoints are computed in round-to-nearest and corrected to a directed
// bound using exact error terms (2Sum / fma residuals); an endpoint is only
// widened when the floating-point operation was actually inexact.  All
// operations keep the containment contract: the exact real result of the
// operation applied to any points of the inputs lies in the output interval.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <algorithm>

namespace rotnum {

class IntervalError : public std::runtime_error {
public:
    explicit IntervalError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline double succ(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
inline double pred(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }

// Error of a rounded sum: s = fl(a+b), returns e with a+b = s+e exactly.
inline double two_sum_err(double a, double b, double s) {
    double bb = s - a;
    double err1 = b - bb;
    double aa = s - bb;
    double err2 = a - aa;
    return err1 + err2;
}

inline void check_finite(double x) {
    if (!std::isfinite(x)) throw IntervalError("interval overflow");
}

// Directed endpoints of a+b.
inline double add_down(double a, double b) {
    double s = a + b;
    check_finite(s);
    double e = two_sum_err(a, b, s);
    return e < 0.0 ? pred(s) : s;
}
inline double add_up(double a, double b) {
    double s = a + b;
    check_finite(s);
    double e = two_sum_err(a, b, s);
    return e > 0.0 ? succ(s) : s;
}
inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// fma residual is exact unless the product is in the (sub)normal underflow
// range; widen unconditionally there.
inline bool mul_residual_trusted(double p) {
    return p == 0.0 || std::abs(p) >= 0x1p-1000;
}

inline double mul_down(double a, double b) {
    double p = a * b;
    check_finite(p);
    if (p == 0.0 && a != 0.0 && b != 0.0) return -std::numeric_limits<double>::denorm_min();
    if (!mul_residual_trusted(p)) return pred(p);
    double e = std::fma(a, b, -p);
    return e < 0.0 ? pred(p) : p;
}
inline double mul_up(double a, double b) {
    double p = a * b;
    check_finite(p);
    if (p == 0.0 && a != 0.0 && b != 0.0) return std::numeric_limits<double>::denorm_min();
    if (!mul_residual_trusted(p)) return succ(p);
    double e = std::fma(a, b, -p);
    return e > 0.0 ? succ(p) : p;
}

// Directed quotient: residual r = fma(q,b,-a) is exact in the same regime;
// a/b > q  iff  sign(a - q*b) == sign(b).
inline double div_down(double a, double b) {
    double q = a / b;
    check_finite(q);
    if (q == 0.0 && a != 0.0) return std::signbit(a) == std::signbit(b) ? 0.0 : -std::numeric_limits<double>::denorm_min();
    if (!mul_residual_trusted(q) || !mul_residual_trusted(a)) return pred(q);
    double r = std::fma(q, b, -a);   // q*b - a
    if (r == 0.0) return q;
    bool exact_above = (std::signbit(-r) == std::signbit(b)); // true quotient > q
    return exact_above ? q : pred(q);
}
inline double div_up(double a, double b) {
    double q = a / b;
    check_finite(q);
    if (q == 0.0 && a != 0.0) return std::signbit(a) == std::signbit(b) ? std::numeric_limits<double>::denorm_min() : -0.0;
    if (!mul_residual_trusted(q) || !mul_residual_trusted(a)) return succ(q);
    double r = std::fma(q, b, -a);
    if (r == 0.0) return q;
    bool exact_above = (std::signbit(-r) == std::signbit(b));
    return exact_above ? succ(q) : q;
}

} // namespace detail

struct Interval {
    double lo;
    double hi;

    Interval() : lo(0.0), hi(0.0) {}
    Interval(double point) : lo(point), hi(point) { validate(); }
    Interval(double l, double h) : lo(l), hi(h) { validate(); }

    void validate() const {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw IntervalError("invalid interval endpoints");
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw IntervalError("interval overflow");
    }
};

inline double width_up(const Interval& a) { return detail::sub_up(a.hi, a.lo); }

inline double mid(const Interval& a) {
    double m = 0.5 * (a.lo + a.hi);
    if (!std::isfinite(m)) m = 0.5 * a.lo + 0.5 * a.hi;
    return std::clamp(m, a.lo, a.hi);
}

inline double rad(const Interval& a) {
    double m = mid(a);
    return std::max(detail::sub_up(m, a.lo), detail::sub_up(a.hi, m));
}

inline Interval hull(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
    double lo = std::max(a.lo, b.lo);
    double hi = std::min(a.hi, b.hi);
    if (lo > hi) return std::nullopt;
    return Interval(lo, hi);
}

inline bool contains(const Interval& a, double t) { return a.lo <= t && t <= a.hi; }
inline bool contains(const Interval& a, const Interval& b) { return a.lo <= b.lo && b.hi <= a.hi; }
inline bool subset(const Interval& a, const Interval& b) { return contains(b, a); }
inline bool strictly_inside(const Interval& a, const Interval& b) { return b.lo < a.lo && a.hi < b.hi; }

inline Interval add(const Interval& a, const Interval& b) {
    return Interval(detail::add_down(a.lo, b.lo), detail::add_up(a.hi, b.hi));
}
inline Interval sub(const Interval& a, const Interval& b) {
    return Interval(detail::sub_down(a.lo, b.hi), detail::sub_up(a.hi, b.lo));
}
inline Interval neg(const Interval& a) { return Interval(-a.hi, -a.lo); }

inline Interval mul(const Interval& a, const Interval& b) {
    using namespace detail;
    double lo = std::min(std::min(mul_down(a.lo, b.lo), mul_down(a.lo, b.hi)),
                         std::min(mul_down(a.hi, b.lo), mul_down(a.hi, b.hi)));
    double hi = std::max(std::max(mul_up(a.lo, b.lo), mul_up(a.lo, b.hi)),
                         std::max(mul_up(a.hi, b.lo), mul_up(a.hi, b.hi)));
    return Interval(lo, hi);
}

inline Interval div(const Interval& a, const Interval& b) {
    using namespace detail;
    if (b.lo <= 0.0 && 0.0 <= b.hi) throw IntervalError("division by interval containing zero");
    double lo = std::min(std::min(div_down(a.lo, b.lo), div_down(a.lo, b.hi)),
                         std::min(div_down(a.hi, b.lo), div_down(a.hi, b.hi)));
    double hi = std::max(std::max(div_up(a.lo, b.lo), div_up(a.lo, b.hi)),
                         std::max(div_up(a.hi, b.lo), div_up(a.hi, b.hi)));
    return Interval(lo, hi);
}

inline Interval operator+(const Interval& a, const Interval& b) { return add(a, b); }
inline Interval operator-(const Interval& a, const Interval& b) { return sub(a, b); }
inline Interval operator-(const Interval& a) { return neg(a); }
inline Interval operator*(const Interval& a, const Interval& b) { return mul(a, b); }
inline Interval operator/(const Interval& a, const Interval& b) { return div(a, b); }

// Tight enclosure of 2*pi.
inline Interval two_pi() {
    double approx = 0x1.921fb54442d18p+2;   // below 2*pi
    return Interval(approx, detail::succ(approx));
}

namespace detail {

// libm results are assumed faithful to <= 1 ulp and padded by 2 ulps outward.
inline Interval pad2(double lo, double hi) {
    return Interval(pred(pred(lo)), succ(succ(hi)));
}

// Enclosure of sin(2*pi*t) for a point t (t expected in [0, 2)).
inline Interval sin2pi_point(double t) {
    Interval arg = mul(two_pi(), Interval(t));
    double s1 = std::sin(arg.lo);
    double s2 = std::sin(arg.hi);
    double w = width_up(arg);   // Lipschitz-1 slack over the argument interval
    Interval r = pad2(sub_down(std::min(s1, s2), w), add_up(std::max(s1, s2), w));
    return *intersect(r, Interval(-1.0, 1.0));
}

} // namespace detail

// Enclosure of {sin(2*pi*t) : t in x}.
inline Interval sin_2pi(const Interval& x) {
    static const Interval full(-1.0, 1.0);
    if (width_up(x) >= 1.0 || std::abs(x.lo) >= 0x1p52) return full;
    double base = std::floor(x.lo);
    double rlo = x.lo - base;    // exact: |x| < 2^52 and 0 <= rlo < 1
    double rhi = x.hi - base;    // exact, rhi < 2
    Interval lo_val = detail::sin2pi_point(rlo);
    Interval hi_val = detail::sin2pi_point(rhi);
    Interval r = hull(lo_val, hi_val);
    auto spans = [&](double c) { return rlo <= c && c <= rhi; };
    if (spans(0.25) || spans(1.25)) r.hi = 1.0;
    if (spans(0.75) || spans(1.75)) r.lo = -1.0;
    return *intersect(r, full);
}

// Enclosure of {cos(2*pi*t) : t in x}, via the quarter-turn shift.
inline Interval cos_2pi(const Interval& x) {
    return sin_2pi(add(x, Interval(0.25)));
}

namespace detail {

// Enclosure (in turns) of atan2 at a single point, padded for libm error.
inline Interval atan2_turns_point(double y, double x) {
    double t = std::atan2(y, x);
    return div(pad2(t, t), two_pi());
}

} // namespace detail

// Enclosure of the angle, in normalized turns, of all points of the
// rectangle (x, y).  The rectangle must not contain the origin; it then lies
// in a half-plane and the extremal angles are attained at corners.  Corner
// branches are aligned to the midpoint angle, so the result is a connected
// interval (it may extend beyond (-1/2, 1/2]).
inline Interval atan2_circle(const Interval& y, const Interval& x) {
    if (contains(x, 0.0) && contains(y, 0.0)) throw IntervalError("origin in rectangle");
    double ref = std::atan2(mid(y), mid(x)) / 6.283185307179586;
    bool first = true;
    Interval acc(0.0);
    for (double cx : {x.lo, x.hi}) {
        for (double cy : {y.lo, y.hi}) {
            Interval t = detail::atan2_turns_point(cy, cx);
            double k = std::nearbyint(ref - mid(t));
            t = add(t, Interval(k));
            acc = first ? t : hull(acc, t);
            first = false;
        }
    }
    return acc;
}

} // namespace rotnum
