#pragma once

// JSON and text rendering of results.  Interval endpoints are serialized as
// hexadecimal floating-point literals (bit-exact round trip); a decimal
// rendering in compact shared-prefix notation (e.g. 0.2198099931_{17}^{39})
// is attached for human readers.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>

#include "rotnum/interval.hpp"
#include "rotnum/rotation.hpp"

namespace rotnum {

inline std::string double_to_hex(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

inline double double_from_hex(const std::string& text) {
    return std::strtod(text.c_str(), nullptr);
}

// Compact decimal rendering: common prefix of the two endpoints, then the
// remaining digits of lo as subscript and of hi as superscript.
inline std::string interval_to_decimal(const Interval& v) {
    char lo_buf[64], hi_buf[64];
    if (v.lo == v.hi) {
        std::snprintf(lo_buf, sizeof lo_buf, "%.17g", v.lo);
        return lo_buf;
    }
    bool fixed_ok = v.lo > -10.0 && v.hi < 10.0;
    if (fixed_ok) {
        std::snprintf(lo_buf, sizeof lo_buf, "%.17f", v.lo);
        std::snprintf(hi_buf, sizeof hi_buf, "%.17f", v.hi);
        std::string lo(lo_buf), hi(hi_buf);
        if (lo.size() == hi.size() && (v.lo >= 0.0) == (v.hi >= 0.0)) {
            std::size_t k = 0;
            while (k < lo.size() && lo[k] == hi[k]) ++k;
            if (k > 0 && lo.find('.') < k) {
                return lo.substr(0, k) + "_{" + lo.substr(k) + "}^{" + hi.substr(k) + "}";
            }
        }
    }
    std::snprintf(lo_buf, sizeof lo_buf, "%.17g", v.lo);
    std::snprintf(hi_buf, sizeof hi_buf, "%.17g", v.hi);
    return std::string("[") + lo_buf + ", " + hi_buf + "]";
}

inline nlohmann::json interval_to_json(const Interval& v) {
    return nlohmann::json{
        {"lo_hex", double_to_hex(v.lo)},
        {"hi_hex", double_to_hex(v.hi)},
        {"lo", v.lo},
        {"hi", v.hi},
        {"decimal", interval_to_decimal(v)},
    };
}

inline Interval interval_from_json(const nlohmann::json& j) {
    return Interval(double_from_hex(j.at("lo_hex").get<std::string>()),
                    double_from_hex(j.at("hi_hex").get<std::string>()));
}

inline const char* status_name(RhoStatus s) {
    switch (s) {
        case RhoStatus::Ok: return "ok";
        case RhoStatus::Rational: return "rational";
        case RhoStatus::TargetReached: return "target-reached";
        case RhoStatus::BudgetExhausted: return "budget-exhausted";
        case RhoStatus::AmbiguousArc: return "ambiguous-arc";
    }
    return "unknown";
}

inline nlohmann::json rotation_result_to_json(const RotationResult& r) {
    nlohmann::json j;
    j["method"] = r.method;
    j["status"] = status_name(r.status);
    j["enclosure"] = interval_to_json(r.enclosure);
    j["radius"] = rad(r.enclosure);
    j["iterates"] = r.iterates_used;
    j["conditional"] = r.conditional;
    j["seconds"] = r.seconds;
    if (!r.cf_coefficients.empty()) j["cf_coefficients"] = r.cf_coefficients;
    if (!r.state.stages.empty()) {
        nlohmann::json stages = nlohmann::json::array();
        for (const CFStage& s : r.state.stages) {
            stages.push_back(nlohmann::json{
                {"a", s.a}, {"p", s.p}, {"q", s.q}, {"iterates", s.n_used}});
        }
        j["stages"] = stages;
        j["conjugated"] = r.state.conjugated;
    }
    if (r.rationality) {
        nlohmann::json cert;
        cert["p"] = r.rationality->p;
        cert["q"] = r.rationality->q;
        cert["exact_return"] = r.rationality->certificate.exact_return;
        if (!r.rationality->certificate.orbit.empty())
            cert["orbit_point"] = interval_to_json(r.rationality->certificate.orbit.front());
        else if (!r.rationality->certificate.plane_orbit.empty()) {
            cert["orbit_point_x"] = interval_to_json(r.rationality->certificate.plane_orbit.front().x);
            cert["orbit_point_y"] = interval_to_json(r.rationality->certificate.plane_orbit.front().y);
        }
        j["rationality"] = cert;
    }
    return j;
}

} // namespace rotnum
