#pragma once

// Registry of the dynamical systems under study: the Arnold circle family,
// the delayed logistic plane map, and rigid rotations.  Parameters are
// intervals, so parameter uncertainty (e.g. a decimal that is not exactly
// representable) propagates through every evaluation.
//
// 1-D maps expose their lift F (chosen with F(0) in [0,1)); 2-D maps expose
// the plane map, its Jacobian, and a circle-coordinate observable: the
// lifted angle, in turns, around the map's rotation center.

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>

#include "rotnum/interval.hpp"

namespace rotnum {

class MapError : public std::runtime_error {
public:
    explicit MapError(const std::string& what) : std::runtime_error(what) {}
};

enum class MapKind { Arnold, DelayedLogistic, RigidRotation };

struct PlanePoint {
    Interval x;
    Interval y;
};

struct PlaneMatrix {     // row-major 2x2
    Interval a11, a12, a21, a22;
};

class MapDescriptor {
public:
    static MapDescriptor arnold(Interval alpha, Interval epsilon) {
        Interval mag(std::min(std::abs(epsilon.lo), std::abs(epsilon.hi)),
                     std::max(std::abs(epsilon.lo), std::abs(epsilon.hi)));
        if (epsilon.lo <= 0.0 && 0.0 <= epsilon.hi) mag.lo = 0.0;
        if (mul(two_pi(), mag).hi > 1.0)
            throw MapError("Arnold map requires 2*pi*|epsilon| <= 1");
        MapDescriptor m;
        m.kind_ = MapKind::Arnold;
        m.alpha_ = alpha;
        m.epsilon_ = epsilon;
        m.dimension_ = 1;
        return m;
    }

    static MapDescriptor rigid(Interval alpha) {
        MapDescriptor m;
        m.kind_ = MapKind::RigidRotation;
        m.alpha_ = alpha;
        m.dimension_ = 1;
        return m;
    }

    static MapDescriptor delayed_logistic(Interval lambda, bool unsafe = false) {
        if (!unsafe && !(lambda.lo > 2.0 && lambda.hi <= 2.16))
            throw MapError("delayed logistic map requires lambda in (2, 2.16] (pass unsafe to override)");
        MapDescriptor m;
        m.kind_ = MapKind::DelayedLogistic;
        m.lambda_ = lambda;
        m.dimension_ = 2;
        // The invariant curve winds clockwise around the interior fixed
        // point; measure turns in that orientation so the rotation number
        // comes out in the same convention as approximate methods report.
        m.angle_clockwise_ = true;
        return m;
    }

    MapKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    const Interval& alpha() const { return alpha_; }
    const Interval& epsilon() const { return epsilon_; }
    const Interval& lambda() const { return lambda_; }
    bool angle_clockwise() const { return angle_clockwise_; }

    // --- 1-D lift ---

    Interval lift_eval(const Interval& x) const {
        switch (kind_) {
            case MapKind::RigidRotation:
                return add(x, alpha_);
            case MapKind::Arnold:
                return sub(add(x, alpha_), mul(epsilon_, sin_2pi(x)));
            default:
                throw MapError("lift_eval requires a 1-D map");
        }
    }

    Interval lift_deriv(const Interval& x) const {
        switch (kind_) {
            case MapKind::RigidRotation:
                return Interval(1.0);
            case MapKind::Arnold:
                return sub(Interval(1.0), mul(mul(two_pi(), epsilon_), cos_2pi(x)));
            default:
                throw MapError("lift_deriv requires a 1-D map");
        }
    }

    // Enclosure of F(prev) - cur for point values.  Evaluating F(prev) and
    // subtracting would round at the magnitude of the lifted coordinate
    // (which grows linearly along an orbit); instead the difference
    // prev - cur is taken exactly (2Sum) so all rounding happens at the
    // magnitude of the residual itself.
    Interval lift_residual(double prev, double cur) const {
        double d = prev - cur;
        double e = detail::two_sum_err(prev, -cur, d);
        Interval diff(detail::add_down(d, e), detail::add_up(d, e));
        switch (kind_) {
            case MapKind::RigidRotation:
                return add(diff, alpha_);
            case MapKind::Arnold:
                return sub(add(diff, alpha_), mul(epsilon_, sin_2pi(Interval(prev))));
            default:
                throw MapError("lift_residual requires a 1-D map");
        }
    }

    double lift_eval_approx(double x) const {
        switch (kind_) {
            case MapKind::RigidRotation:
                return x + mid(alpha_);
            case MapKind::Arnold: {
                // reduce before the sin call: the phase error of
                // sin(2*pi*x) grows with the lift magnitude
                double t = x - std::floor(x);
                return x + mid(alpha_) - mid(epsilon_) * std::sin(6.283185307179586 * t);
            }
            default:
                throw MapError("lift_eval_approx requires a 1-D map");
        }
    }

    // --- 2-D plane map ---

    PlanePoint plane_eval(const PlanePoint& p) const {
        require_2d();
        return PlanePoint{p.y, mul(lambda_, mul(p.y, sub(Interval(1.0), p.x)))};
    }

    PlaneMatrix plane_jacobian(const PlanePoint& p) const {
        require_2d();
        return PlaneMatrix{Interval(0.0), Interval(1.0),
                           neg(mul(lambda_, p.y)), mul(lambda_, sub(Interval(1.0), p.x))};
    }

    std::pair<double, double> plane_eval_approx(double x, double y) const {
        require_2d();
        return {y, mid(lambda_) * y * (1.0 - x)};
    }

    // Rotation center: the interior fixed point ((lambda-1)/lambda, same).
    PlanePoint rotation_center() const {
        require_2d();
        Interval c = div(sub(lambda_, Interval(1.0)), lambda_);
        return PlanePoint{c, c};
    }

    // Lifted angle, in turns, of p around the rotation center, continuous
    // with prev_turns (the branch is chosen so the increment enclosure lies
    // strictly inside (-1/2, 1/2)).
    Interval angle_observable(const PlanePoint& p, const Interval& prev_turns) const {
        require_2d();
        PlanePoint c = rotation_center();
        Interval t = atan2_circle(sub(p.y, c.y), sub(p.x, c.x));
        if (angle_clockwise_) t = neg(t);
        double k = std::nearbyint(mid(prev_turns) - mid(t));
        Interval lifted = add(t, Interval(k));
        Interval incr = sub(lifted, prev_turns);
        if (!(incr.lo > -0.5 && incr.hi < 0.5)) throw MapError("ambiguous winding");
        return lifted;
    }

private:
    void require_2d() const {
        if (dimension_ != 2) throw MapError("operation requires a 2-D map");
    }

    MapKind kind_ = MapKind::RigidRotation;
    Interval alpha_{0.0};
    Interval epsilon_{0.0};
    Interval lambda_{0.0};
    int dimension_ = 1;
    bool angle_clockwise_ = false;
};

// Tightest binary64 interval enclosing a decimal parameter string.
inline Interval interval_from_decimal(const std::string& text) {
    double d = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(d)) throw IntervalError("interval overflow");
    long double ld = std::strtold(text.c_str(), nullptr);
    if (static_cast<long double>(d) == ld) return Interval(d);
    if (ld > static_cast<long double>(d)) return Interval(d, detail::succ(d));
    return Interval(detail::pred(d), d);
}

} // namespace rotnum
