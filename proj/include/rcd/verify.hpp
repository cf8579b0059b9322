#pragma once

// Invariant suites run by `rcd verify`.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rcd/analysis.hpp"
#include "rcd/exact.hpp"
#include "rcd/solver.hpp"
#include "rcd/transform.hpp"

namespace rcd::verify {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline double rel(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline CheckResult bound(std::string suite, std::string name, double value, double limit) {
    return {std::move(suite), std::move(name), value <= limit,
            "value " + sci(value) + " (limit " + sci(limit) + ")"};
}

} // namespace detail

inline std::vector<CheckResult> algebra_suite() {
    using detail::bound;
    using detail::rel;
    std::vector<CheckResult> out;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> Kdist(-5.0, 0.25);

    double vieta = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double K = Kdist(rng);
        const auto e = eigenvalues(ModelParams::constant(2.0, K));
        vieta = std::max(vieta, std::abs(e.lambda1 + e.lambda2 + 1.0));
        vieta = std::max(vieta, rel(e.lambda1 * e.lambda2, K));
    }
    out.push_back(bound("algebra", "vieta (1000 K < 1/4)", vieta, 1e-14));

    for (double m : {2.0, 3.0}) {
        double worst_minus = 0.0;
        double worst_plus = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double K = 1e-6 + (0.2499 - 1e-6) * (i + 1) / 100.0;
            worst_minus = std::max(worst_minus, rel(K_of_gamma(m, gamma_of_K(m, K, Branch::Minus)), K));
            worst_plus = std::max(worst_plus, rel(K_of_gamma(m, gamma_of_K(m, K, Branch::Plus)), K));
        }
        const std::string tag = " m=" + std::to_string(static_cast<int>(m));
        out.push_back(bound("algebra", "round trip minus branch" + tag, worst_minus, 1e-12));
        out.push_back(bound("algebra", "round trip plus branch" + tag, worst_plus, 1e-12));
    }
    out.push_back(bound("algebra", "gamma_minus(m=3, K=0.24) = 0",
                        std::abs(gamma_of_K(3.0, 0.24, Branch::Minus)), 1e-13));
    out.push_back(bound("algebra", "K_of_gamma(gamma=2) = 0", std::abs(K_of_gamma(3.0, 2.0)), 1e-13));
    out.push_back(bound("algebra", "gamma_minus(K=0) = (m+1)/m",
                        std::abs(gamma_of_K(3.0, 0.0, Branch::Minus) - 4.0 / 3.0), 1e-13));
    out.push_back(bound("algebra", "gamma_plus(m=3, K=15/64) = 3",
                        std::abs(gamma_of_K(3.0, 15.0 / 64.0, Branch::Plus) - 3.0), 1e-13));

    const auto super = build_transform(ModelParams::constant(2.0, 0.5));
    double inv = 0.0;
    for (int i = 1; i < 100; ++i) {
        const double x = -3.1 + 6.2 * i / 100.0;
        inv = std::max(inv, rel(super.inverse_map(super.space_map(x)), x));
    }
    out.push_back(bound("algebra", "super map inverse round trip", inv, 1e-12));
    return out;
}

inline std::vector<CheckResult> exact_suite() {
    using detail::bound;
    using detail::rel;
    std::vector<CheckResult> out;
    const TranslatedBarenblatt tb(3.0, 1.0, 5.0);
    const TransformedB0 image(3.0, 1.0, 5.0);
    const auto map = build_transform(ModelParams::constant(3.0, 0.24));
    const double T = image.blowup_time();

    double worst = 0.0;
    for (int j = 1; j <= 10; ++j) {
        const double t = T * j / 11.0;
        const auto sup = image.support(t);
        const double len = sup.hi - sup.lo;
        std::vector<double> ys;
        std::vector<double> th;
        for (int i = 0; i < 200; ++i) {
            const double x = sup.lo + len * (0.01 + 0.98 * i / 199.0);
            ys.push_back(map.space_map(x));
            th.push_back(tb.eval(ys.back(), t * map.time_scale));
        }
        const auto u = map_solution(map, GridFunction(ys, th, t * map.time_scale), Direction::Inverse);
        for (std::size_t i = 0; i < u.size(); ++i) {
            worst = std::max(worst, rel(u.values()[i], image.eval(u.nodes()[i], u.time())));
        }
    }
    out.push_back(bound("exact", "transform consistency (m=3, K=0.24), 200 x 10", worst, 1e-12));
    const double lam = image.lambda;
    out.push_back(bound("exact", "blow-up time T = tau0 / lambda^2",
                        rel(T, tb.focus_time() / (lam * lam)), 1e-10));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int bad = 0;
    for (int draw = 0; draw < 50; ++draw) {
        const double m = 1.5 + 2.0 * U(rng);
        const double C = 0.5 + U(rng);
        const double gamma = -0.5 + (1.0 + 1.0 / m) * 0.9 * U(rng);
        const double t = 0.5 + 2.0 * U(rng);
        const std::vector<ExactSolution> fams = {
            ExactSolution::translated_barenblatt(m, C, 3.0 + 4.0 * U(rng)),
            ExactSolution::barenblatt_gamma(m, C, gamma),
            ExactSolution::dipole_gamma(m, C, gamma),
            ExactSolution::transformed_b0(m, C, 3.0 + 4.0 * U(rng)),
            ExactSolution::transformed_b(m, C, gamma),
            ExactSolution::transformed_z(m, C, gamma)};
        for (const auto& f : fams) {
            const auto s = f.support(t);
            const double lo = std::isfinite(s.lo) ? s.lo : s.hi - 20.0;
            const double mid = 0.5 * (lo + s.hi);
            const double outside = s.hi + 0.1 * (s.hi - lo);
            if (!(f.eval(mid, t) > 0.0) || f.eval(outside, t) != 0.0) {
                ++bad;
            }
        }
    }
    out.push_back({"exact", "eval positive inside, zero outside support (50 draws)", bad == 0,
                   std::to_string(bad) + " violations"});

    bool increasing = true;
    for (const auto& f : {ExactSolution::transformed_b(2.0, 1.0, 0.5),
                          ExactSolution::transformed_z(2.0, 1.0, 0.5)}) {
        const double a = f.eval(-10.0, 1.0);
        const double b = f.eval(-20.0, 1.0);
        const double c = f.eval(-40.0, 1.0);
        increasing = increasing && a < b && b < c;
    }
    out.push_back({"exact", "divergence toward -inf (x = -10, -20, -40)", increasing, ""});
    return out;
}

inline std::vector<CheckResult> solver_suite() {
    using detail::bound;
    std::vector<CheckResult> out;
    {
        const auto nodes = uniform_grid(0.5, 10.0, 0.05);
        const GridFunction zero(nodes, std::vector<double>(nodes.size(), 0.0), 0.0);
        const PdeSpec spec{power_density_equation(2.0, 1.0), {0.5, 10.0}, ZeroFlux{}, ZeroFlux{}};
        SolverConfig cfg;
        cfg.snapshot_times = {0.5, 1.0};
        const auto r = solve(spec, zero, 1.0, cfg);
        bool ok = std::holds_alternative<ReachedFinalTime>(r.stop_reason);
        for (const auto& s : r.snapshots) {
            ok = ok && s.max_value() == 0.0;
        }
        out.push_back({"solver", "zero data stays zero", ok, describe(r.stop_reason)});
    }
    {
        const auto nodes = uniform_grid(0.5, 10.0, 0.05);
        std::vector<double> v(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            v[i] = std::max(0.0, 1.0 - 4.0 * (nodes[i] - 2.0) * (nodes[i] - 2.0));
        }
        const PdeSpec spec{power_density_equation(2.0, 1.0), {0.5, 10.0}, ZeroFlux{}, ZeroFlux{}};
        SolverConfig cfg;
        cfg.stop_on_left_contact = false;
        cfg.snapshot_times = {1.0, 2.0, 4.0};
        const GridFunction init(nodes, v, 0.0);
        const auto r = solve(spec, init, 4.0, cfg);
        double drift = 0.0;
        bool positive = true;
        for (const auto& s : r.snapshots) {
            drift = std::max(drift, std::abs(weighted_mass(spec, s) / r.initial_weighted_mass - 1.0));
            positive = positive && *std::min_element(s.values().begin(), s.values().end()) >= 0.0;
        }
        out.push_back(bound("solver", "weighted mass drift (ZeroFlux)", drift, 1e-6));
        out.push_back({"solver", "snapshots nonnegative", positive, ""});
        out.push_back(bound("solver", "clamped mass / initial mass",
                            r.stats.clamped_mass / r.initial_weighted_mass, 1e-8));
    }
    {
        const TranslatedBarenblatt tb(3.0, 1.0, 5.0);
        const auto nodes = uniform_grid(0.01, 20.0, 0.02);
        std::vector<double> v(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            v[i] = tb.eval(nodes[i], 1.0);
        }
        const PdeSpec spec{power_density_equation(3.0, 0.0), {nodes.front(), nodes.back()}};
        SolverConfig cfg;
        const auto r = solve(spec, GridFunction(nodes, v, 1.0), 2.0, cfg);
        double err = 0.0;
        const auto& s = r.snapshots.back();
        const auto sup = tb.support(2.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double y = s.nodes()[i];
            if (y > sup.lo + 0.5 && y < sup.hi - 0.5) {
                err = std::max(err, std::abs(s.values()[i] - tb.eval(y, 2.0)));
            }
        }
        out.push_back(bound("solver", "translated Barenblatt at tau=2, dx=0.02, 0.5 inside the edges",
                            err, 5e-3));
    }
    return out;
}

inline std::vector<CheckResult> run_suite(const std::string& name) {
    std::vector<CheckResult> out;
    auto append = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
    if (name == "algebra" || name == "all") {
        append(algebra_suite());
    }
    if (name == "exact" || name == "all") {
        append(exact_suite());
    }
    if (name == "solver" || name == "all") {
        append(solver_suite());
    }
    if (out.empty()) {
        throw DomainError("unknown suite '" + name + "' (algebra, exact, solver, all)");
    }
    return out;
}

} // namespace rcd::verify
