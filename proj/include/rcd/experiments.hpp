#pragma once

// Preset experiments. Each takes a Config whose keys override the defaults
// listed in the corresponding *_defaults() function.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rcd/analysis.hpp"
#include "rcd/exact.hpp"
#include "rcd/io.hpp"
#include "rcd/solver.hpp"
#include "rcd/transform.hpp"

namespace rcd::experiments {

using io::Config;
using io::json;

struct Outcome {
    std::string name;
    std::vector<GridFunction> snapshots;
    std::optional<InterfaceTrace> trace;
    json summary = json::object();
};

inline std::vector<double> time_grid(double t0, double t1, double step) {
    std::vector<double> out;
    if (!(step > 0.0)) {
        throw DomainError("snapshot step must be positive");
    }
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
    for (std::size_t i = 1; i <= n; ++i) {
        out.push_back(t0 + step * static_cast<double>(i));
    }
    return out;
}

inline SolverConfig solver_config(const Config& c, std::vector<double> snapshots) {
    SolverConfig s;
    s.cfl_safety = c.num("cfl", s.cfl_safety);
    s.dt_max = c.num("dt_max", s.dt_max);
    s.positivity_threshold = c.num("eps");
    s.amplitude_cap = c.num("amplitude_cap");
    s.snapshot_times = std::move(snapshots);
    return s;
}

inline json run_summary(const RunResult& r) {
    return {{"stop_reason", io::to_json(r.stop_reason)},
            {"steps", io::to_json(r.stats)},
            {"threshold", r.threshold},
            {"initial_weighted_mass", r.initial_weighted_mass},
            {"final_time", r.snapshots.back().time()}};
}

// ---------------------------------------------------------------------------
// TransformedB0 data from t = t_start on [x_lo, x_hi]: left-edge escape to -inf.

inline Outcome blowup_minus_infinity(const Config& c) {
    const double m = c.num("m", 3.0);
    const double C = c.num("C", 1.0);
    const double y0 = c.num("y0", 5.0);
    const double x_lo = c.num("x_lo", -80.0);
    const double x_hi = c.num("x_hi", 20.0);
    const double dx = c.num("dx", 0.05);
    const double t_start = c.num("t_start", 1.0);
    const double t_final = c.num("t_final", 400.0);
    const double step = c.num("snapshot_dt", 0.06);
    const double ws = c.num("fit_window_start", 0.75);
    const double we = c.num("fit_window_end", 0.95);

    const TransformedB0 exact(m, C, y0);
    auto nodes = uniform_grid(x_lo, x_hi, dx);
    std::vector<double> u0(nodes.size());
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        u0[i] = exact.eval(nodes[i], t_start);
    }
    const GridFunction initial(nodes, u0, t_start);
    const PdeSpec spec{ReactionConvection{m, exact.K}, {nodes.front(), nodes.back()}};
    auto cfg = solver_config(c, time_grid(t_start, t_final, step));
    if (!cfg.amplitude_cap) {
        cfg.amplitude_cap = 1e9 * initial.max_value();
    }
    const auto run = solve(spec, initial, t_final, cfg);
    auto trace = track_interfaces(run, run.threshold);

    Outcome out{"blowup-minus-infinity", run.snapshots, trace, run_summary(run)};
    const double T = exact.blowup_time();
    const auto fit = estimate_blowup_time(trace, EdgeModel::LogEdge, Side::Left, {ws, we});
    const double init_max = initial.max_value();
    double running = 0.0;
    json probes = json::array();
    for (double xq : c.list("probe_points").empty() ? std::vector<double>{-10.0, 0.0, 10.0}
                                                    : c.list("probe_points")) {
        const auto i = static_cast<std::size_t>(std::llround((xq - nodes.front()) / (nodes[1] - nodes[0])));
        double peak = 0.0;
        for (const auto& s : run.snapshots) {
            peak = std::max(peak, s.values()[i]);
        }
        probes.push_back({{"x", nodes[i]}, {"initial", u0[i]}, {"max", peak},
                          {"max_over_initial_max", peak / init_max}});
    }
    for (const auto& s : run.snapshots) {
        running = std::max(running, s.max_value());
    }
    out.summary["K"] = exact.K;
    out.summary["exact_blowup_time"] = T;
    out.summary["fit"] = io::to_json(fit);
    out.summary["relative_error"] = std::abs(fit.estimate - T) / T;
    out.summary["initial_max"] = init_max;
    out.summary["running_max_ratio"] = running / init_max;
    out.summary["probes"] = probes;
    return out;
}

// ---------------------------------------------------------------------------
// y^(-gamma) theta_tau = (theta^m)_yy with compact data, escape to y_max.
// initial = bump: parabola on [bump_lo, bump_hi], zero flux at y_lo.
// initial = barenblatt: B_gamma at tau = t_start, y_lo held at the exact trace.

inline Outcome interface_blowup(const Config& c) {
    const double m = c.num("m", 2.0);
    const double gamma = c.num("gamma", 3.0);
    const double y_lo = c.num("y_lo", 0.5);
    const double dx = c.num("dx", 0.1);
    const std::string initial = c.str("initial", "bump");
    auto y_max = c.list("y_max");
    if (y_max.empty()) {
        y_max = {50.0, 100.0, 200.0};
    }

    std::vector<double> nodes;
    std::vector<double> th;
    double t0 = 0.0;
    BoundaryCondition left = ZeroFlux{};
    if (initial == "bump") {
        const double a = c.num("bump_lo", 1.0);
        const double b = c.num("bump_hi", 2.0);
        const double height = c.num("bump_height", 1.0);
        if (!(b > a && a > y_lo)) {
            throw DomainError("interface-blowup: need y_lo < bump_lo < bump_hi");
        }
        nodes = uniform_grid(y_lo, b + 0.5, dx);
        for (double y : nodes) {
            const double s = (2.0 * y - a - b) / (b - a);
            th.push_back(height * std::max(0.0, 1.0 - s * s));
        }
    } else if (initial == "barenblatt") {
        const BarenblattGamma exact(m, c.num("C", 1.0), gamma);
        t0 = c.num("t_start", 1.0);
        nodes = uniform_grid(y_lo, exact.support(t0).hi + 1.0, dx);
        for (double y : nodes) {
            th.push_back(exact.eval(y, t0));
        }
        left = DirichletValue{[exact, y_lo](double t) { return exact.eval(y_lo, t); }};
    } else {
        throw DomainError("interface-blowup: initial must be bump or barenblatt");
    }

    EscapeOptions opt;
    opt.t_final = c.num("t_final", 1e6);
    opt.parallel = c.num("parallel", 1.0) != 0.0;
    opt.left = left;
    const double t_first = c.num("snapshot_log_start", -3.0);
    const double t_last = c.num("snapshot_log_end", 4.0);
    const double per_decade = c.num("snapshots_per_decade", 100.0);
    std::vector<double> times;
    for (double e = t_first; e <= t_last + 1e-12; e += 1.0 / per_decade) {
        times.push_back(std::pow(10.0, e));
    }
    opt.config = solver_config(c, times);
    const auto runs =
        interface_blowup_experiment(m, gamma, GridFunction(nodes, th, t0), y_max, opt);

    Outcome out{"interface-blowup", runs.back().result.snapshots, std::nullopt, json::object()};
    out.trace = track_interfaces(runs.back().result, runs.back().result.threshold);
    json escapes = json::array();
    std::vector<double> t;
    for (const auto& r : runs) {
        escapes.push_back({{"y_max", r.y_max}, {"escape_time", io::optional_json(r.escape_time)},
                           {"run", run_summary(r.result)}});
        if (r.escape_time) {
            t.push_back(*r.escape_time);
        }
    }
    json ratios = json::array();
    if (t.size() == runs.size()) {
        for (std::size_t i = 2; i < t.size(); ++i) {
            ratios.push_back((t[i - 1] - t[i - 2]) / (t[i] - t[i - 1]));
        }
    }
    out.summary["m"] = m;
    out.summary["gamma"] = gamma;
    out.summary["initial"] = initial;
    out.summary["escapes"] = escapes;
    out.summary["increment_ratios"] = ratios;
    out.summary["beta"] = 1.0 / (m + 1.0 - m * gamma);
    try {
        const auto fit = estimate_blowup_time(*out.trace, EdgeModel::PowerLawEdge, Side::Right,
                                              {c.num("fit_window_start", 0.5),
                                               c.num("fit_window_end", 0.95)});
        out.summary["edge_fit"] = io::to_json(fit);
    } catch (const FitError& e) {
        out.summary["edge_fit"] = {{"error", e.what()}};
    }
    return out;
}

// ---------------------------------------------------------------------------
// K > 1/4 Dirichlet problem on (-pi/w, pi/w): convergence to the isothermal profile.

inline Outcome isothermal(const Config& c) {
    const double m = c.num("m", 2.0);
    const double K = c.num("K", 0.5);
    const auto n = static_cast<std::size_t>(c.num("nodes", 401.0));
    const double half_width = c.num("bump_half_width", 0.5);
    const double center = c.num("bump_center", 0.0);
    const double t_final = c.num("t_final", 32.0);
    const double step = c.num("snapshot_dt", 0.5);

    const auto params = ModelParams::constant(m, K);
    const auto map = build_transform(params);
    const auto nodes = linspace(map.x_domain.lo, map.x_domain.hi, n);
    std::vector<double> u0(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = (nodes[i] - center) / half_width;
        u0[i] = std::abs(s) < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * s), 2) : 0.0;
    }
    const GridFunction initial(nodes, u0, 0.0);
    const auto limit = isothermal_limit(params, initial);
    const PdeSpec spec{ReactionConvection{m, K}, map.x_domain};
    auto cfg = solver_config(c, time_grid(0.0, t_final, step));
    cfg.stop_on_left_contact = false;
    cfg.stop_on_right_contact = false;
    const auto run = solve(spec, initial, t_final, cfg);

    json series = json::array();
    double last = 0.0;
    double first_full = -1.0;
    bool monotone = true;
    const double q = 0.25 * (map.x_domain.hi - map.x_domain.lo);
    for (const auto& s : run.snapshots) {
        double d = 0.0;
        bool covered = true;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double x = s.nodes()[i];
            if (std::abs(x - 0.5 * (map.x_domain.lo + map.x_domain.hi)) <= q) {
                d = std::max(d, std::abs(map.amplitude(x) * s.values()[i] - limit.theta_bar));
                covered = covered && s.values()[i] > 0.0;
            }
        }
        // transient ends once the support covers the middle half
        if (covered && first_full < 0.0) {
            first_full = s.time();
        } else if (first_full >= 0.0 && d > last) {
            monotone = false;
        }
        last = d;
        series.push_back({{"t", s.time()}, {"sup_distance", d}});
    }
    Outcome out{"isothermal", run.snapshots, std::nullopt, run_summary(run)};
    out.summary["theta_bar"] = limit.theta_bar;
    out.summary["weighted_mass"] = limit.weighted_mass;
    out.summary["density_integral"] = limit.density_integral;
    out.summary["tail_bound"] = limit.tail_bound;
    out.summary["distance_series"] = series;
    out.summary["final_relative_distance"] = last / limit.theta_bar;
    out.summary["transient_end"] = first_full;
    out.summary["monotone_after_transient"] = monotone && first_full >= 0.0;
    out.snapshots.push_back(limit.profile);
    return out;
}

// ---------------------------------------------------------------------------
// K = 1/4: amplitude exponent of the running maximum near the escape time.

inline Outcome critical_rate(const Config& c) {
    const double m = c.num("m", 2.0);
    const double x_lo = c.num("x_lo", -40.0);
    const double x_hi = c.num("x_hi", 10.0);
    const double dx = c.num("dx", 0.05);
    const double half_width = c.num("bump_half_width", 1.0);
    const double t_final = c.num("t_final", 1e3);
    const double step = c.num("snapshot_dt", 0.01);
    const double ws = c.num("fit_window_start", 0.75);
    const double we = c.num("fit_window_end", 0.95);

    const auto nodes = uniform_grid(x_lo, x_hi, dx);
    std::vector<double> u0(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double s = nodes[i] / half_width;
        u0[i] = std::max(0.0, 1.0 - s * s);
    }
    const GridFunction initial(nodes, u0, 0.0);
    const PdeSpec spec{ReactionConvection{m, 0.25}, {nodes.front(), nodes.back()}};
    auto cfg = solver_config(c, time_grid(0.0, t_final, step));
    if (!cfg.amplitude_cap) {
        cfg.amplitude_cap = 1e9;
    }
    const auto run = solve(spec, initial, t_final, cfg);
    auto trace = track_interfaces(run, run.threshold);
    const auto edge = estimate_blowup_time(trace, EdgeModel::LogEdge, Side::Left, {ws, we});
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.times[i] >= edge.window.lo && trace.times[i] <= edge.window.hi) {
            series.emplace_back(trace.times[i], trace.max_value[i]);
        }
    }
    const auto rate = fit_rate_exponent(series, edge.estimate);
    Outcome out{"critical-rate", run.snapshots, trace, run_summary(run)};
    out.summary["edge_fit"] = io::to_json(edge);
    out.summary["rate_fit"] = io::to_json(rate);
    out.summary["exponent"] = rate.estimate;
    out.summary["predicted_interval"] = {-1.0 / (2.0 * (m - 1.0)), -1.0 / (4.0 * (m - 1.0))};
    // edge ~ (2 m lam / (m-1)) ln(T - t) under y = -(m-1) x / (2m)
    out.summary["edge_speed_lambda"] = edge.coefficients[0] * (m - 1.0) / (2.0 * m);
    return out;
}

// ---------------------------------------------------------------------------
// Paired theta-side / u-side samples of the translated Barenblatt profile.

struct FigurePair {
    double tau;
    GridFunction theta;
    GridFunction u;
};

inline std::vector<FigurePair> figure1(const Config& c) {
    const double m = c.num("m", 3.0);
    const double C = c.num("C", 1.0);
    const double y0 = c.num("y0", 5.0);
    const auto ny = static_cast<std::size_t>(c.num("y_nodes", 1201.0));
    const double y_hi = c.num("y_hi", 12.0);
    const double x_lo = c.num("x_lo", -20.0);
    const double x_hi = c.num("x_hi", 12.0);
    const auto nx = static_cast<std::size_t>(c.num("x_nodes", 1601.0));
    const TranslatedBarenblatt theta(m, C, y0);
    auto taus = c.list("taus");
    if (taus.empty()) {
        taus = {0.5, 1.0, 2.0, 3.0, 4.0, theta.focus_time()};
    }
    const TransformedB0 image(m, C, y0);
    const auto map = build_transform(ModelParams::constant(m, image.K));

    std::vector<FigurePair> out;
    const auto ys = linspace(0.0, y_hi, ny);
    const auto xs = linspace(x_lo, x_hi, nx);
    for (double tau : taus) {
        std::vector<double> tv(ny);
        for (std::size_t i = 0; i < ny; ++i) {
            tv[i] = theta.eval(ys[i], tau);
        }
        std::vector<double> yx(nx);
        std::vector<double> tx(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            yx[i] = map.space_map(xs[i]);
            tx[i] = theta.eval(yx[i], tau);
        }
        const auto u = map_solution(map, GridFunction(yx, tx, tau), Direction::Inverse);
        out.push_back({tau, GridFunction(ys, tv, tau), u});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config-driven run.
//   equation = reaction-convection (m, K) | power-density (m, gamma)
//   x_lo, x_hi, dx, left_bc / right_bc = dirichlet0 | zeroflux
//   initial = zero | bump (bump_center, bump_half_width, bump_height)
//           | exact (family, C, y0, gamma; sampled at t_start)
//   t_start, t_final, snapshot_dt, fit = none | logedge-left | powerlaw-right

inline ExactSolution exact_from_config(const Config& c) {
    const std::string family = c.str("family", "translated-barenblatt");
    const double m = c.num("m", 3.0);
    const double C = c.num("C", 1.0);
    if (family == "translated-barenblatt") {
        return ExactSolution::translated_barenblatt(m, C, c.num("y0", 5.0));
    }
    if (family == "barenblatt-gamma") {
        return ExactSolution::barenblatt_gamma(m, C, c.num("gamma", 1.0));
    }
    if (family == "dipole-gamma") {
        return ExactSolution::dipole_gamma(m, C, c.num("gamma", 1.0));
    }
    if (family == "transformed-b0") {
        return ExactSolution::transformed_b0(m, C, c.num("y0", 5.0));
    }
    if (family == "transformed-b") {
        return ExactSolution::transformed_b(m, C, c.num("gamma", 0.5));
    }
    if (family == "transformed-z") {
        return ExactSolution::transformed_z(m, C, c.num("gamma", 0.5));
    }
    throw DomainError("unknown family '" + family + "'");
}

inline BoundaryCondition boundary_from(const std::string& name) {
    if (name == "dirichlet0") {
        return Dirichlet0{};
    }
    if (name == "zeroflux") {
        return ZeroFlux{};
    }
    throw DomainError("unknown boundary condition '" + name + "' (dirichlet0, zeroflux)");
}

inline Outcome generic(const Config& c) {
    const std::string eq = c.str("equation", "reaction-convection");
    const double m = c.num("m", 2.0);
    EquationKind kind;
    if (eq == "reaction-convection") {
        kind = ReactionConvection{m, c.num("K", 0.0)};
    } else if (eq == "power-density") {
        kind = power_density_equation(m, c.num("gamma", 0.0));
    } else {
        throw DomainError("unknown equation '" + eq + "' (reaction-convection, power-density)");
    }
    const double x_lo = c.num("x_lo", eq == "power-density" ? 0.1 : -10.0);
    const double x_hi = c.num("x_hi", 10.0);
    const double dx = c.num("dx", 0.05);
    if (!(dx > 0.0) || !(x_hi > x_lo)) {
        throw DomainError("need dx > 0 and x_lo < x_hi");
    }
    const double t_start = c.num("t_start", 0.0);
    const double t_final = c.num("t_final", 1.0);
    const auto nodes = uniform_grid(x_lo, x_hi, dx);
    const PdeSpec spec{kind, {nodes.front(), nodes.back()}, boundary_from(c.str("left_bc", "dirichlet0")),
                       boundary_from(c.str("right_bc", "dirichlet0"))};

    std::vector<double> u0(nodes.size(), 0.0);
    const std::string initial = c.str("initial", "bump");
    if (initial == "bump") {
        const double center = c.num("bump_center", 0.5 * (x_lo + x_hi));
        const double hw = c.num("bump_half_width", 1.0);
        const double h = c.num("bump_height", 1.0);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double s = (nodes[i] - center) / hw;
            u0[i] = h * std::max(0.0, 1.0 - s * s);
        }
    } else if (initial == "exact") {
        const auto sol = exact_from_config(c);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            u0[i] = sol.eval(nodes[i], t_start);
        }
    } else if (initial != "zero") {
        throw DomainError("unknown initial '" + initial + "' (zero, bump, exact)");
    }
    if (std::holds_alternative<Dirichlet0>(spec.left)) {
        u0.front() = 0.0;
    }
    if (std::holds_alternative<Dirichlet0>(spec.right)) {
        u0.back() = 0.0;
    }
    auto cfg = solver_config(c, time_grid(t_start, t_final, c.num("snapshot_dt", 0.1)));
    cfg.stop_on_left_contact = c.num("stop_left", 1.0) != 0.0;
    cfg.stop_on_right_contact = c.num("stop_right", 1.0) != 0.0;
    const auto run = solve(spec, GridFunction(nodes, u0, t_start), t_final, cfg);
    auto trace = track_interfaces(run, run.threshold);
    Outcome out{"simulate", run.snapshots, trace, run_summary(run)};
    const std::string fit = c.str("fit", "none");
    if (fit == "logedge-left") {
        out.summary["fit"] = io::to_json(estimate_blowup_time(trace, EdgeModel::LogEdge, Side::Left));
    } else if (fit == "powerlaw-right") {
        out.summary["fit"] =
            io::to_json(estimate_blowup_time(trace, EdgeModel::PowerLawEdge, Side::Right));
    } else if (fit != "none") {
        throw DomainError("unknown fit '" + fit + "' (none, logedge-left, powerlaw-right)");
    }
    return out;
}

inline Outcome run_preset(const std::string& name, const Config& c) {
    if (name == "blowup-minus-infinity") {
        return blowup_minus_infinity(c);
    }
    if (name == "interface-blowup") {
        return interface_blowup(c);
    }
    if (name == "isothermal") {
        return isothermal(c);
    }
    if (name == "critical-rate") {
        return critical_rate(c);
    }
    if (name == "none" || name.empty()) {
        return generic(c);
    }
    throw DomainError("unknown preset '" + name +
                      "' (blowup-minus-infinity, interface-blowup, isothermal, critical-rate)");
}

} // namespace rcd::experiments
