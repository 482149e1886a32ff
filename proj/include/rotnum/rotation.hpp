#pragma once

// Rotation-number enclosures.
//
// Two algorithms: the linear one (iterate N steps, |rho_N - rho| <= 1/N) and
// the quadratic continued-fraction one, which derives the CF coefficients of
// rho from certified return times of the orbit of the starting point and
// encloses rho between neighbouring convergents.  Rationality is certified
// along the way by verified periodic orbits.
//
// The CF bookkeeping uses the closest-return structure of circle
// homeomorphisms: with convergent denominators q_i, the i-th return point is
// b_i = f^{q_i}(0), and a_{i+1} is the smallest k >= 1 such that
// f^{q_{i-1} + (k+1) q_i}(0) lies in the arc I_i between b_i and 0.  All
// membership tests are three-valued on certified boxes.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rotnum/interval.hpp"
#include "rotnum/maps.hpp"
#include "rotnum/shooting.hpp"

namespace rotnum {

class RotationError : public std::runtime_error {
public:
    explicit RotationError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Certified orbit providers: lifted circle coordinate w_i with w_0 = 0.

class CircleOrbitProvider {
public:
    virtual ~CircleOrbitProvider() = default;
    virtual Interval w(std::uint64_t i) = 0;   // enclosure of the lifted coordinate of iterate i
    virtual void tighten() = 0;                // one extra Newton pass over the current orbit
    virtual std::uint64_t iterates_used() const = 0;
};

// 1-D: the certified lift orbit of x0 = 0.
class LiftOrbit final : public CircleOrbitProvider {
public:
    LiftOrbit(const MapDescriptor& m, ShootingOptions opts = {}) : map_(m), opts_(opts) {}

    Interval w(std::uint64_t i) override {
        if (i == 0) return Interval(0.0);
        ensure(i);
        hwm_ = std::max(hwm_, i);
        return cert_.boxes[i - 1];
    }

    void tighten() override {
        if (!approx_.empty()) rotnum::tighten(map_, cert_, approx_);
    }

    std::uint64_t iterates_used() const override { return hwm_; }

private:
    void ensure(std::uint64_t n) {
        if (n <= cert_.boxes.size()) return;
        std::uint64_t target = std::max<std::uint64_t>(n, std::max<std::uint64_t>(1024, 2 * cert_.boxes.size()));
        while (approx_.size() < target) {
            y_ = map_.lift_eval_approx(y_);
            double k = std::floor(y_);
            y_ -= k;
            wind_ += k;
            approx_.push_back(wind_ + y_);
        }
        cert_ = newton_refine(map_, 0.0, approx_, opts_);
    }

    const MapDescriptor& map_;
    ShootingOptions opts_;
    std::vector<double> approx_;
    OrbitEnclosure cert_;
    double y_ = 0.0, wind_ = 0.0;
    std::uint64_t hwm_ = 0;
};

// 2-D: rigorous plane orbit (QR-framed direct iteration) observed through
// the lifted angle; coordinates are normalized so the exact initial point
// sits at angle 0.
class AngleOrbit final : public CircleOrbitProvider {
public:
    AngleOrbit(const MapDescriptor& m, double x0, double y0)
        : map_(m), x0_(x0), y0_(y0), tube_(m, x0, y0) {
        theta0_ = map_.angle_observable(PlanePoint{Interval(x0_), Interval(y0_)}, Interval(0.0));
    }

    // Deterministic start on (near) the invariant curve: transient from an
    // offset of the fixed point.
    static AngleOrbit from_transient(const MapDescriptor& m, std::size_t transient = 4096) {
        PlanePoint c = m.rotation_center();
        double x = mid(c.x) + 0.01, y = mid(c.y);
        for (std::size_t i = 0; i < transient; ++i) {
            auto [nx, ny] = m.plane_eval_approx(x, y);
            x = nx; y = ny;
        }
        return AngleOrbit(m, x, y);
    }

    Interval w(std::uint64_t i) override {
        if (i == 0) return Interval(0.0);
        ensure(i);
        hwm_ = std::max(hwm_, i);
        return sub(theta_[i - 1], theta0_);
    }

    // The direct enclosure has no slack to recover; nothing to do.
    void tighten() override {}

    std::uint64_t iterates_used() const override { return hwm_; }

    double start_x() const { return x0_; }
    double start_y() const { return y0_; }

private:
    void ensure(std::uint64_t n) {
        if (n <= theta_.size()) return;
        tube_.extend(n);
        Interval prev = theta_.empty() ? theta0_ : theta_.back();
        for (std::size_t i = theta_.size(); i < tube_.boxes().size(); ++i) {
            theta_.push_back(map_.angle_observable(tube_.boxes()[i], prev));
            prev = theta_.back();
        }
    }

    const MapDescriptor& map_;
    double x0_, y0_;
    PlaneCurveEnclosure tube_;
    std::vector<Interval> theta_;
    Interval theta0_{0.0};
    std::uint64_t hwm_ = 0;
};

inline std::unique_ptr<CircleOrbitProvider> make_orbit_provider(const MapDescriptor& m,
                                                                const ShootingOptions& opts = {}) {
    if (m.dimension() == 1) return std::make_unique<LiftOrbit>(m, opts);
    auto orbit = AngleOrbit::from_transient(m);
    return std::make_unique<AngleOrbit>(std::move(orbit));
}

// ---------------------------------------------------------------------------
// Results

enum class RhoStatus {
    Ok,                 // stage limit reached normally
    Rational,           // rationality certified
    TargetReached,      // requested radius achieved
    BudgetExhausted,    // iterate budget ran out; best enclosure returned
    AmbiguousArc,       // an iterate box straddled an arc endpoint
};

struct Rationality {
    long long p = 0;
    std::uint64_t q = 1;
    PeriodicCertificate certificate;
};

struct CFStage {
    std::uint64_t a = 0;       // coefficient a_i
    std::uint64_t p = 0, q = 0;  // convergent after this stage
    std::uint64_t n_used = 0;  // orbit iterates consumed through this stage
    Interval b{0.0};           // return point b_i (circle coordinate)
    bool arc_low = true;       // arc form: (0, b] vs [b, 1)
};

struct CFState {
    std::vector<CFStage> stages;
    bool conjugated = false;   // algorithm ran on the reversed-orientation coordinate
};

struct RotationResult {
    Interval enclosure{0.0};
    std::string method;        // "linear" or "cf"
    std::uint64_t iterates_used = 0;
    std::optional<Rationality> rationality;
    std::vector<std::uint64_t> cf_coefficients;
    bool conditional = false;  // set for delayed-logistic results
    RhoStatus status = RhoStatus::Ok;
    CFState state;
    double seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Linear algorithm

inline RotationResult rho_linear(const MapDescriptor& m, double x0, std::uint64_t N,
                                 const ShootingOptions& opts = {}) {
    if (N == 0) throw RotationError("iterate count must be positive");
    RotationResult res;
    res.method = "linear";
    res.conditional = m.dimension() == 2;
    Interval rho_n;
    if (m.dimension() == 1) {
        auto approx = approximate_orbit(m, x0, N);
        auto orbit = newton_refine(m, x0, approx, opts);
        rho_n = div(sub(orbit.boxes.back(), Interval(x0)), Interval(static_cast<double>(N)));
    } else {
        auto provider = make_orbit_provider(m, opts);
        rho_n = div(provider->w(N), Interval(static_cast<double>(N)));
    }
    Interval inv_n = div(Interval(1.0), Interval(static_cast<double>(N)));
    res.enclosure = add(rho_n, Interval(-inv_n.hi, inv_n.hi));
    res.iterates_used = N;
    return res;
}

// ---------------------------------------------------------------------------
// Continued-fraction algorithm

struct CFOptions {
    std::uint64_t budget = 1000000;     // maximum orbit iterates
    int max_stage = 24;                 // maximum CF coefficients
    double target_radius = 0.0;         // stop when the enclosure is this tight (0 = off)
    std::uint64_t rationality_cap = 512;  // skip periodic verification beyond this period
    ShootingOptions shooting;
};

namespace detail {

inline Interval exact_ratio(std::uint64_t num, std::uint64_t den) {
    // all convergents stay far below 2^53, so the conversions are exact
    return div(Interval(static_cast<double>(num)), Interval(static_cast<double>(den)));
}

// Enclosure of rho from convergents p_i/q_i, p_{i-1}/q_{i-1} and the
// knowledge a_{i+1} >= bound (bound = 1 is the plain two-convergent
// enclosure).
inline Interval convergent_bound_enclosure(std::uint64_t p_i, std::uint64_t q_i,
                                           std::uint64_t p_im1, std::uint64_t q_im1,
                                           std::uint64_t bound) {
    Interval right = exact_ratio(p_i, q_i);
    Interval left = exact_ratio(bound * p_i + p_im1, bound * q_i + q_im1);
    return hull(left, right);
}

enum class ArcTest { Inside, Outside, Straddle };

// Three-valued membership of a certified box in the arc (0, b] (low) or
// [b, 1), on the circle; the box may straddle an integer.
inline ArcTest in_arc(const Interval& r, const Interval& b, bool low) {
    for (double s : {-1.0, 0.0, 1.0}) {
        if (low) {
            if (r.lo > s && r.hi <= add_down(s, b.lo)) return ArcTest::Inside;
            if (r.lo > add_up(s, b.hi) && r.hi <= s + 1.0) return ArcTest::Outside;
        } else {
            if (r.lo >= add_up(s, b.hi) && r.hi < s + 1.0) return ArcTest::Inside;
            if (r.lo >= s && r.hi < add_down(s, b.lo)) return ArcTest::Outside;
        }
    }
    return ArcTest::Straddle;
}

inline bool mul_add_fits(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t& out) {
    unsigned __int128 v = static_cast<unsigned __int128>(a) * b + c;
    if (v >= (static_cast<unsigned __int128>(1) << 53)) return false;   // keep binary64-exact
    out = static_cast<std::uint64_t>(v);
    return true;
}

} // namespace detail

// Evaluate the enclosure [0; a_1, ..., a_i + [0,1]] of Lemma-type form:
// hull of the continued fractions with last coefficient a_i and a_i + 1,
// both evaluated bottom-up in interval arithmetic.
inline Interval convergent_enclosure(const std::vector<std::uint64_t>& a) {
    if (a.empty()) throw RotationError("empty coefficient list");
    auto eval = [](const std::vector<std::uint64_t>& c, double bump) {
        Interval t(static_cast<double>(c.back()) + bump);
        for (std::size_t j = c.size() - 1; j-- > 0;)
            t = add(Interval(static_cast<double>(c[j])), div(Interval(1.0), t));
        return div(Interval(1.0), t);
    };
    return hull(eval(a, 0.0), eval(a, 1.0));
}

namespace detail {

inline double closing_residual_1d(const MapDescriptor& m, const std::vector<double>& pts) {
    double err = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        double fx = m.lift_eval_approx(pts[j]);
        double gap = fx - std::floor(fx) - pts[(j + 1) % pts.size()];
        gap -= std::nearbyint(gap);
        err = std::max(err, std::abs(gap));
    }
    return err;
}

// Candidate periodic orbit of a 1-D circle map: iterate a fixed point (0.5)
// through a transient, then collect q circle coordinates.  Near a tongue
// boundary the attraction can be weak, so the transient is extended until
// the closing residual settles (or a cap is reached); the residual is
// returned so the caller can decide whether verification is worth running.
inline std::pair<std::vector<double>, double> periodic_candidate_1d(const MapDescriptor& m,
                                                                    std::uint64_t q) {
    auto frac = [](double x) { double f = x - std::floor(x); return f < 1.0 ? f : 0.0; };
    double x = 0.5;
    std::uint64_t done = 0;
    std::uint64_t transient = std::max<std::uint64_t>(10 * q, 1000);
    const std::uint64_t cap = std::max<std::uint64_t>(500 * q, 100000);
    std::vector<double> pts(q);
    double err = 1.0;
    for (;;) {
        for (; done < transient; ++done) x = frac(m.lift_eval_approx(x));
        double y = x;
        for (std::uint64_t j = 0; j < q; ++j) {
            pts[j] = y;
            y = frac(m.lift_eval_approx(y));
        }
        err = closing_residual_1d(m, pts);
        if (err < 1e-12 || transient >= cap) break;
        transient = std::min<std::uint64_t>(cap, 4 * transient);
    }
    return {std::move(pts), err};
}

inline double closing_residual_2d(const MapDescriptor& m,
                                  const std::vector<std::pair<double, double>>& pts) {
    double err = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        auto [fx, fy] = m.plane_eval_approx(pts[j].first, pts[j].second);
        auto [nx, ny] = pts[(j + 1) % pts.size()];
        err = std::max(err, std::max(std::abs(fx - nx), std::abs(fy - ny)));
    }
    return err;
}

inline std::pair<std::vector<std::pair<double, double>>, double> periodic_candidate_2d(
        const MapDescriptor& m, double x0, double y0, std::uint64_t q) {
    double x = x0, y = y0;
    std::uint64_t done = 0;
    std::uint64_t transient = std::max<std::uint64_t>(10 * q, 1000);
    const std::uint64_t cap = std::max<std::uint64_t>(500 * q, 100000);
    std::vector<std::pair<double, double>> pts(q);
    double err = 1.0;
    for (;;) {
        for (; done < transient; ++done) {
            auto [nx, ny] = m.plane_eval_approx(x, y);
            x = nx; y = ny;
        }
        double cx = x, cy = y;
        for (std::uint64_t j = 0; j < q; ++j) {
            pts[j] = {cx, cy};
            auto [nx, ny] = m.plane_eval_approx(cx, cy);
            cx = nx; cy = ny;
        }
        err = closing_residual_2d(m, pts);
        if (err < 1e-12 || transient >= cap) break;
        transient = std::min<std::uint64_t>(cap, 4 * transient);
    }
    return {std::move(pts), err};
}

} // namespace detail

inline RotationResult rho_cf(const MapDescriptor& m, const CFOptions& opts = {}) {
    if (opts.budget == 0) throw RotationError("iterate budget must be positive");
    RotationResult res;
    res.method = "cf";
    res.conditional = m.dimension() == 2;

    ShootingOptions sopts = opts.shooting;
    std::unique_ptr<CircleOrbitProvider> orbit = make_orbit_provider(m, sopts);
    const AngleOrbit* angle_orbit =
        m.dimension() == 2 ? static_cast<const AngleOrbit*>(orbit.get()) : nullptr;

    bool conj = false;

    // lifted coordinate of iterate n in working orientation
    auto lifted = [&](std::uint64_t n) {
        Interval v = orbit->w(n);
        return conj ? neg(v) : v;
    };
    // circle coordinate: reduced so its midpoint lies in [0, 1)
    auto circ = [&](std::uint64_t n) {
        Interval v = lifted(n);
        double base = std::floor(mid(v));
        Interval r = sub(v, Interval(base));
        if (mid(r) >= 1.0) r = sub(r, Interval(1.0));
        else if (mid(r) < 0.0) r = add(r, Interval(1.0));
        return r;
    };
    // exact-arithmetic rational detection: F^n(0) is exactly an integer
    auto exact_integer_return = [&](std::uint64_t n) -> std::optional<long long> {
        Interval v = orbit->w(n);
        if (v.lo == v.hi && v.lo == std::nearbyint(v.lo)) return static_cast<long long>(v.lo);
        return std::nullopt;
    };

    auto finish = [&](Interval enc, RhoStatus status) {
        if (conj) enc = sub(Interval(1.0), enc);
        res.enclosure = enc;
        res.status = status;
        res.iterates_used = orbit->iterates_used();
        res.state.conjugated = conj;
        return res;
    };

    // --- initial point b_0 = f(0) ---
    Interval b0 = circ(1);
    if (auto pw = exact_integer_return(1)) {
        PeriodicCertificate cert;
        cert.q = 1;
        cert.p = *pw;
        cert.exact_return = true;
        res.rationality = Rationality{*pw, 1, std::move(cert)};
        res.enclosure = Interval(static_cast<double>(*pw));
        res.status = RhoStatus::Rational;
        res.iterates_used = orbit->iterates_used();
        return res;
    }
    if (b0.hi < 0.5 || (b0.lo == 0.5 && b0.hi == 0.5)) {
        // I_0 = (0, b_0]
    } else if (b0.lo > 0.5) {
        conj = true;               // run on y = 1 - x; rho' = 1 - rho < 1/2
        b0 = circ(1);
    } else {
        throw RotationError("b0 at tie within tolerance");
    }

    // convergent state: (p_im1/q_im1, p_cur/q_cur) with seeds for stage 0
    std::uint64_t p_im1 = 1, q_im1 = 0, p_cur = 0, q_cur = 1;
    Interval b_cur = b0, b_prev(0.0);
    bool low_cur = true;           // I_0 is always (0, b_0] after conjugation

    auto current_enclosure = [&](std::uint64_t bound) {
        return detail::convergent_bound_enclosure(p_cur, q_cur, p_im1, q_im1,
                                                  std::max<std::uint64_t>(bound, 1));
    };

    // p_map is the winding per period measured on the map's own lift, so no
    // orientation transform is needed here.
    auto rational_from = [&](long long p_map, std::uint64_t q, PeriodicCertificate cert) {
        long long g = std::gcd(p_map < 0 ? -p_map : p_map, static_cast<long long>(q));
        if (g > 1) { p_map /= g; q = static_cast<std::uint64_t>(static_cast<long long>(q) / g); }
        res.rationality = Rationality{p_map, q, std::move(cert)};
        res.enclosure = div(Interval(static_cast<double>(p_map)), Interval(static_cast<double>(q)));
        res.status = RhoStatus::Rational;
        res.iterates_used = orbit->iterates_used();
        res.state.conjugated = conj;
        return res;
    };

    for (int stage = 0; stage < opts.max_stage; ++stage) {
        // rationality pre-check at the current denominator; the Newton
        // verification is only attempted when the transient candidate has
        // actually converged to a periodic cycle (the closing residual is a
        // cheap and sufficient filter, and skipping is always sound)
        if (stage >= 1 && q_cur >= 2 && q_cur <= opts.rationality_cap) {
            try {
                PeriodicCertificate cert;
                bool plausible = false;
                if (m.dimension() == 1) {
                    auto [cand, err] = detail::periodic_candidate_1d(m, q_cur);
                    plausible = err < 1e-9;
                    if (plausible) cert = verify_periodic(m, cand, q_cur, sopts);
                } else {
                    auto [cand, err] = detail::periodic_candidate_2d(m, angle_orbit->start_x(),
                                                                     angle_orbit->start_y(), q_cur);
                    plausible = err < 1e-9;
                    if (plausible) cert = verify_periodic_plane(m, cand, q_cur, sopts);
                }
                if (plausible) return rational_from(cert.p, cert.q, std::move(cert));
            } catch (const ShootingError&) {
                // not (provably) rational at this denominator; keep going
            } catch (const MapError&) {
            }
        }

        // scan for a_{stage+1}: first k >= 1 with c_{k+1} in I_i,
        // c_m = f^{q_{i-1} + m q_i}(0)
        std::uint64_t m_scan = 2;
        std::uint64_t a_found = 0;
        bool stop = false;
        RhoStatus stop_status = RhoStatus::Ok;
        std::uint64_t bound_on_exit = 1;
        while (true) {
            std::uint64_t n = 0;
            if (!detail::mul_add_fits(m_scan, q_cur, q_im1, n) || n > opts.budget) {
                stop = true;
                stop_status = RhoStatus::BudgetExhausted;
                bound_on_exit = m_scan - 1;
                break;
            }
            // an exact integer return at any scanned iterate certifies
            // rho = p/n outright (and would otherwise confuse the arc
            // tests: the point lies in neither open arc)
            if (auto pw = exact_integer_return(n)) {
                PeriodicCertificate cert;
                cert.q = n;
                cert.p = *pw;
                cert.exact_return = true;
                return rational_from(*pw, n, std::move(cert));
            }
            Interval r = circ(n);
            detail::ArcTest where = detail::in_arc(r, b_cur, low_cur);
            if (where == detail::ArcTest::Straddle) {
                orbit->tighten();
                r = circ(n);
                where = detail::in_arc(r, b_cur, low_cur);
            }
            if (where == detail::ArcTest::Straddle) {
                stop = true;
                stop_status = RhoStatus::AmbiguousArc;
                bound_on_exit = m_scan - 1;
                break;
            }
            if (where == detail::ArcTest::Inside) {
                a_found = m_scan - 1;
                break;
            }
            // consistency: while outside I_i the point must sit in I_{i-1}
            if (stage >= 1 &&
                detail::in_arc(r, b_prev, !low_cur) == detail::ArcTest::Outside) {
                orbit->tighten();
                Interval r2 = circ(n);
                if (detail::in_arc(r2, b_cur, low_cur) == detail::ArcTest::Outside &&
                    detail::in_arc(r2, b_prev, !low_cur) == detail::ArcTest::Outside) {
                    stop = true;
                    stop_status = RhoStatus::AmbiguousArc;
                    bound_on_exit = m_scan - 1;
                    break;
                }
            }
            if (opts.target_radius > 0.0 &&
                rad(current_enclosure(m_scan)) <= opts.target_radius) {
                stop = true;
                stop_status = RhoStatus::TargetReached;
                bound_on_exit = m_scan;
                break;
            }
            ++m_scan;
        }
        if (stop) return finish(current_enclosure(bound_on_exit), stop_status);

        std::uint64_t p_new = 0, q_new = 0;
        if (!detail::mul_add_fits(a_found, p_cur, p_im1, p_new) ||
            !detail::mul_add_fits(a_found, q_cur, q_im1, q_new))
            throw RotationError("convergent overflow");

        Interval b_new = circ(q_new);
        res.cf_coefficients.push_back(a_found);
        CFStage rec;
        rec.a = a_found;
        rec.p = p_new;
        rec.q = q_new;
        rec.n_used = q_new + q_cur;
        rec.b = b_new;
        rec.arc_low = !low_cur;
        res.state.stages.push_back(rec);

        // exact return to the start: rho = p/q certified by exact arithmetic
        if (auto pw = exact_integer_return(q_new)) {
            PeriodicCertificate cert;
            cert.q = q_new;
            cert.p = *pw;
            cert.exact_return = true;
            return rational_from(*pw, q_new, std::move(cert));
        }

        p_im1 = p_cur; q_im1 = q_cur;
        p_cur = p_new; q_cur = q_new;
        b_prev = b_cur;
        b_cur = b_new;
        low_cur = !low_cur;

        if (opts.target_radius > 0.0 && rad(current_enclosure(1)) <= opts.target_radius)
            return finish(current_enclosure(1), RhoStatus::TargetReached);
    }
    return finish(current_enclosure(1), RhoStatus::Ok);
}

// ---------------------------------------------------------------------------
// Width diagnostics (quadratic-convergence bound checks)

struct WidthDiagnosticRow {
    std::uint64_t stage = 0;      // 1-based coefficient index
    double width = 0.0;           // |A|: width of the two-convergent enclosure
    double bound = 0.0;           // 4 / N_i^2
    bool ok = false;              // exact integer comparison N^2 <= 4 q (q + q')
    bool secondary_ok = false;    // |A| <= 2 / (q_i N_i)
};

inline std::vector<WidthDiagnosticRow> width_diagnostic(const CFState& state) {
    std::vector<WidthDiagnosticRow> rows;
    std::uint64_t q_prev = 1;   // q_0 = 1
    for (std::size_t i = 0; i < state.stages.size(); ++i) {
        const CFStage& s = state.stages[i];
        WidthDiagnosticRow row;
        row.stage = static_cast<std::uint64_t>(i + 1);
        std::uint64_t n_i = s.q + q_prev;
        // |A| = 1/(q_i N_i); the bound |A| <= 4/N_i^2 is the exact integer
        // comparison N_i^2 <= 4 q_i N_i, i.e. N_i <= 4 q_i
        row.ok = n_i <= 4 * s.q;
        // second bound, |A| <= 2/(q_i N_i), is 1/(q_i N_i) <= 2/(q_i N_i)
        row.secondary_ok = true;
        double denom = static_cast<double>(s.q) * static_cast<double>(n_i);
        row.width = div(Interval(1.0), Interval(denom)).hi;
        row.bound = div(Interval(4.0), mul(Interval(static_cast<double>(n_i)),
                                           Interval(static_cast<double>(n_i)))).lo;
        rows.push_back(row);
        q_prev = s.q;
    }
    return rows;
}

} // namespace rotnum
