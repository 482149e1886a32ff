// Command-line surface: rotation-number enclosures, staircase sweeps,
// periodic-orbit certificates, and a benchmark harness.
//
// Exit codes: 0 success, 1 error, 2 partial result (budget exhausted or
// ambiguous arc; the enclosure is still emitted), 64 usage.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rotnum/interval.hpp"
#include "rotnum/maps.hpp"
#include "rotnum/rotation.hpp"
#include "rotnum/serialize.hpp"
#include "rotnum/shooting.hpp"

namespace {

using namespace rotnum;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;

struct MapFlags {
    std::string map;
    std::string alpha = "0";
    std::string epsilon = "0";
    std::string lambda = "2.1";
    bool exact_hex = false;
    bool unsafe = false;
};

void add_map_flags(CLI::App* cmd, MapFlags& f) {
    cmd->add_option("--map", f.map, "map kind: arnold, rigid, dlm")->required();
    cmd->add_option("--alpha", f.alpha, "rotation parameter (decimal, or hex float with --exact-hex)");
    cmd->add_option("--epsilon", f.epsilon, "Arnold nonlinearity parameter");
    cmd->add_option("--lambda", f.lambda, "delayed logistic parameter");
    cmd->add_flag("--exact-hex", f.exact_hex, "parse parameters as exact hex-float points");
    cmd->add_flag("--unsafe", f.unsafe, "skip the delayed-logistic lambda range check");
}

Interval parse_param(const std::string& text, bool exact_hex) {
    if (exact_hex) return Interval(double_from_hex(text));
    return interval_from_decimal(text);
}

MapDescriptor build_map(const MapFlags& f) {
    if (f.map == "arnold")
        return MapDescriptor::arnold(parse_param(f.alpha, f.exact_hex),
                                     parse_param(f.epsilon, f.exact_hex));
    if (f.map == "rigid")
        return MapDescriptor::rigid(parse_param(f.alpha, f.exact_hex));
    if (f.map == "dlm")
        return MapDescriptor::delayed_logistic(parse_param(f.lambda, f.exact_hex), f.unsafe);
    throw MapError("unknown map kind: " + f.map);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

int status_exit_code(RhoStatus s) {
    return (s == RhoStatus::BudgetExhausted || s == RhoStatus::AmbiguousArc) ? kExitPartial
                                                                             : kExitOk;
}

unsigned sweep_threads() {
    if (const char* env = std::getenv("ROTNUM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// --- rho ---

struct RhoArgs {
    MapFlags map;
    std::string method = "cf";
    std::uint64_t iters = 10000;
    double x0 = 0.0;
    int stages = 24;
    std::uint64_t budget = 1000000;
    double target_radius = 0.0;
    std::uint64_t rat_cap = 512;
    std::string out;
};

RotationResult run_rho(const MapDescriptor& m, const RhoArgs& a) {
    auto t0 = std::chrono::steady_clock::now();
    RotationResult r;
    if (a.method == "linear") {
        r = rho_linear(m, a.x0, a.iters);
    } else if (a.method == "cf") {
        CFOptions opts;
        opts.budget = a.budget;
        opts.max_stage = a.stages;
        opts.target_radius = a.target_radius;
        opts.rationality_cap = a.rat_cap;
        r = rho_cf(m, opts);
    } else {
        throw std::runtime_error("unknown method: " + a.method);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

int cmd_rho(const RhoArgs& a) {
    MapDescriptor m = build_map(a.map);
    RotationResult r = run_rho(m, a);
    emit(rotation_result_to_json(r).dump(2) + "\n", a.out);
    return status_exit_code(r.status);
}

// --- staircase ---

struct StaircaseArgs {
    MapFlags map;
    std::string param = "alpha";
    double from = 0.0, to = 0.0;
    unsigned points = 2;
    std::string method = "cf";
    std::uint64_t budget = 100000;
    std::uint64_t iters = 10000;
    int stages = 24;
    std::uint64_t rat_cap = 512;
    std::string out;
};

int cmd_staircase(const StaircaseArgs& a) {
    if (!(a.from < a.to)) throw std::runtime_error("sweep range requires --from < --to");
    std::vector<std::string> rows(a.points);
    std::atomic<unsigned> next{0};
    auto worker = [&]() {
        for (;;) {
            unsigned i = next.fetch_add(1);
            if (i >= a.points) return;
            double value = a.from + (a.to - a.from) * static_cast<double>(i) /
                                        static_cast<double>(a.points - 1);
            char vbuf[40];
            std::snprintf(vbuf, sizeof vbuf, "%.17g", value);
            std::ostringstream row;
            row << vbuf << ',';
            try {
                MapFlags f = a.map;
                if (a.param == "alpha") f.alpha = vbuf;
                else if (a.param == "epsilon") f.epsilon = vbuf;
                else if (a.param == "lambda") f.lambda = vbuf;
                else throw std::runtime_error("unknown sweep parameter: " + a.param);
                MapDescriptor m = build_map(f);
                RhoArgs ra;
                ra.method = a.method;
                ra.iters = a.iters;
                ra.budget = a.budget;
                ra.stages = a.stages;
                ra.rat_cap = a.rat_cap;
                RotationResult r = run_rho(m, ra);
                char lo[40], hi[40];
                std::snprintf(lo, sizeof lo, "%.17g", r.enclosure.lo);
                std::snprintf(hi, sizeof hi, "%.17g", r.enclosure.hi);
                row << lo << ',' << hi << ',';
                if (r.rationality) row << r.rationality->p << ',' << r.rationality->q;
                else row << ',';
                row << ',' << r.iterates_used << ',' << status_name(r.status);
            } catch (const std::exception& e) {
                std::string msg = e.what();
                for (char& c : msg)
                    if (c == ',' || c == '\n') c = ';';
                row << ",,,," << 0 << ",error: " << msg;
            }
            rows[i] = row.str();
        }
    };
    unsigned nthreads = std::min<unsigned>(sweep_threads(), a.points);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "# rotnum-staircase v1\n";
    csv << "alpha,rho_lo,rho_hi,rational_p,rational_q,iterates,status\n";
    for (const std::string& row : rows) csv << row << '\n';
    emit(csv.str(), a.out);
    return kExitOk;
}

// --- periodic ---

struct PeriodicArgs {
    MapFlags map;
    std::uint64_t q = 0;
    std::optional<long long> p;
    std::string out;
};

int cmd_periodic(const PeriodicArgs& a) {
    MapDescriptor m = build_map(a.map);
    nlohmann::json j;
    try {
        PeriodicCertificate cert;
        if (m.dimension() == 1) {
            auto [cand, err] = detail::periodic_candidate_1d(m, a.q);
            cert = verify_periodic(m, cand, a.q);
        } else {
            auto orbit = AngleOrbit::from_transient(m);
            auto [cand, err] = detail::periodic_candidate_2d(m, orbit.start_x(), orbit.start_y(), a.q);
            cert = verify_periodic_plane(m, cand, a.q);
        }
        if (a.p && *a.p != cert.p) {
            j["certified"] = false;
            j["reason"] = "winding mismatch: certificate has p=" + std::to_string(cert.p);
            emit(j.dump(2) + "\n", a.out);
            return kExitError;
        }
        j["certified"] = true;
        j["q"] = cert.q;
        j["p"] = cert.p;
        if (!cert.orbit.empty()) j["orbit_point"] = interval_to_json(cert.orbit.front());
        if (!cert.plane_orbit.empty()) {
            j["orbit_point_x"] = interval_to_json(cert.plane_orbit.front().x);
            j["orbit_point_y"] = interval_to_json(cert.plane_orbit.front().y);
        }
        emit(j.dump(2) + "\n", a.out);
        return kExitOk;
    } catch (const ShootingError& e) {
        j["certified"] = false;
        j["reason"] = e.what();
        emit(j.dump(2) + "\n", a.out);
        return kExitError;
    }
}

// --- bench ---

struct BenchPair {
    std::string alpha, epsilon;
    double target_radius;
};

struct BenchArgs {
    std::vector<std::string> pairs;   // "alpha:epsilon:target_radius"
    bool no_default = false;
    std::uint64_t budget = 4000000;
    std::string out;
};

int cmd_bench(const BenchArgs& a) {
    std::vector<BenchPair> pairs;
    if (!a.no_default) {
        // the four benchmark pairs, each run to its published enclosure radius
        pairs = {{"0.22", "0.01", 1.1e-11},
                 {"0.22", "0.159", 5.8e-7},
                 {"0.45", "0.01", 3.4e-11},
                 {"0.45", "0.159", 7.8e-9}};
    }
    for (const std::string& spec : a.pairs) {
        std::istringstream in(spec);
        BenchPair p;
        std::string target;
        if (!std::getline(in, p.alpha, ':') || !std::getline(in, p.epsilon, ':') ||
            !std::getline(in, target))
            throw std::runtime_error("bad pair spec (want alpha:epsilon:target_radius): " + spec);
        p.target_radius = std::strtod(target.c_str(), nullptr);
        pairs.push_back(p);
    }
    std::ostringstream table;
    table << "# rotnum-bench v1\n";
    table << "alpha,epsilon,target_radius,seconds,iterates,radius,stages,status\n";
    for (const BenchPair& p : pairs) {
        MapDescriptor m = MapDescriptor::arnold(interval_from_decimal(p.alpha),
                                                interval_from_decimal(p.epsilon));
        CFOptions opts;
        opts.budget = a.budget;
        opts.target_radius = p.target_radius;
        auto t0 = std::chrono::steady_clock::now();
        RotationResult r = rho_cf(m, opts);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%s,%.3g,%.3f,%llu,%.3g,%zu,%s\n", p.alpha.c_str(),
                      p.epsilon.c_str(), p.target_radius, secs,
                      static_cast<unsigned long long>(r.iterates_used), rad(r.enclosure),
                      r.state.stages.size(), status_name(r.status));
        table << buf;
    }
    emit(table.str(), a.out);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigorous rotation-number enclosures for circle maps"};
    app.require_subcommand(1);

    RhoArgs rho_args;
    CLI::App* rho = app.add_subcommand("rho", "enclose the rotation number of one map");
    add_map_flags(rho, rho_args.map);
    rho->add_option("--method", rho_args.method, "linear or cf")->default_val("cf");
    rho->add_option("--iters", rho_args.iters, "iterate count for the linear method");
    rho->add_option("--x0", rho_args.x0, "initial point for the linear method");
    rho->add_option("--stages", rho_args.stages, "max continued-fraction coefficients");
    rho->add_option("--budget", rho_args.budget, "max orbit iterates for the cf method");
    rho->add_option("--target-radius", rho_args.target_radius, "stop when the enclosure is this tight");
    rho->add_option("--rat-cap", rho_args.rat_cap, "max period for rationality certification");
    rho->add_option("--out", rho_args.out, "write JSON to a file instead of stdout");

    StaircaseArgs st_args;
    CLI::App* st = app.add_subcommand("staircase", "sweep a parameter and emit CSV rows");
    add_map_flags(st, st_args.map);
    st->add_option("--param", st_args.param, "swept parameter: alpha, epsilon, or lambda");
    st->add_option("--from", st_args.from, "sweep start")->required();
    st->add_option("--to", st_args.to, "sweep end")->required();
    st->add_option("--points", st_args.points, "grid count")->check(CLI::Range(2u, 1000000u))->required();
    st->add_option("--method", st_args.method, "linear or cf")->default_val("cf");
    st->add_option("--budget", st_args.budget, "per-point iterate budget");
    st->add_option("--iters", st_args.iters, "iterates for the linear method");
    st->add_option("--stages", st_args.stages, "max cf coefficients per point");
    st->add_option("--rat-cap", st_args.rat_cap, "max period for rationality certification");
    st->add_option("--out", st_args.out, "write CSV to a file instead of stdout");

    PeriodicArgs pd_args;
    CLI::App* pd = app.add_subcommand("periodic", "certify a periodic orbit of period q");
    add_map_flags(pd, pd_args.map);
    pd->add_option("--q", pd_args.q, "period")->required()->check(CLI::PositiveNumber);
    long long p_expected = 0;
    CLI::Option* p_opt = pd->add_option("--p", p_expected, "expected winding number per period");
    pd->add_option("--out", pd_args.out, "write JSON to a file instead of stdout");

    BenchArgs be_args;
    CLI::App* be = app.add_subcommand("bench", "time the cf algorithm on benchmark parameter pairs");
    be->add_option("--pair", be_args.pairs, "extra pair as alpha:epsilon:target_radius");
    be->add_flag("--no-default", be_args.no_default, "start from an empty pair list");
    be->add_option("--budget", be_args.budget, "per-pair iterate budget");
    be->add_option("--out", be_args.out, "write the table to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*rho) return cmd_rho(rho_args);
        if (*st) return cmd_staircase(st_args);
        if (*pd) {
            if (p_opt->count() > 0) pd_args.p = p_expected;
            return cmd_periodic(pd_args);
        }
        if (*be) return cmd_bench(be_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
