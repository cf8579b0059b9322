#pragma once

// Residual oracles, interface extraction, blow-up/rate fits, the
// isothermal limit, and the interface escape experiment.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcd/equation.hpp"
#include "rcd/errors.hpp"
#include "rcd/grid.hpp"
#include "rcd/quadrature.hpp"
#include "rcd/solver.hpp"
#include "rcd/transform.hpp"

namespace rcd {

/// Evaluable field (point, time) -> value.
using Field = std::function<double(double, double)>;

/// Discrete residual of the PDE applied to `field` at interior nodes
/// 1..n-2 (returned in that order, n-2 entries). Time derivative by a
/// central difference over +-dt_probe; space terms by central differences.
///   ReactionConvection: u_t - [v_xx + v_x + K v]
///   Nonhomogeneous:     f theta_t - v_xx
inline std::vector<double> residual(const EquationKind& kind, const Field& field,
                                    std::span<const double> nodes, double time,
                                    double dt_probe) {
    if (!(dt_probe > 0.0)) {
        throw DomainError("residual: dt_probe must be positive");
    }
    const double dx = detail::grid_spacing(nodes);
    const std::size_t n = nodes.size();
    const double m = exponent_of(kind);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::pow(field(nodes[i], time), m);
    }
    const auto* rc = std::get_if<ReactionConvection>(&kind);
    const auto* nh = std::get_if<Nonhomogeneous>(&kind);
    std::vector<double> out(n - 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x = nodes[i];
        const double ut = (field(x, time + dt_probe) - field(x, time - dt_probe)) / (2.0 * dt_probe);
        const double vxx = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dx * dx);
        if (rc) {
            const double vx = (v[i + 1] - v[i - 1]) / (2.0 * dx);
            out[i - 1] = ut - (vxx + vx + rc->K * v[i]);
        } else {
            out[i - 1] = nh->density(x) * ut - vxx;
        }
    }
    return out;
}

inline std::vector<double> residual(const PdeSpec& spec, const Field& field,
                                    std::span<const double> nodes, double time,
                                    double dt_probe) {
    return residual(spec.kind, field, nodes, time, dt_probe);
}

struct InterfaceTrace {
    std::vector<double> times;
    std::vector<std::optional<double>> left_edge;
    std::vector<std::optional<double>> right_edge;
    std::vector<double> max_value;
    std::vector<double> argmax;

    std::size_t size() const { return times.size(); }
};

/// Left/right-most nodes above eps, refined by linear interpolation to the
/// eps crossing. An edge is absent when no node exceeds eps or when the
/// crossing lies at the grid boundary.
inline InterfaceTrace track_interfaces(std::span<const GridFunction> snapshots, double eps) {
    if (!(eps > 0.0)) {
        throw DomainError("track_interfaces: threshold must be positive");
    }
    InterfaceTrace trace;
    for (const auto& s : snapshots) {
        const auto x = s.nodes();
        const auto u = s.values();
        const std::size_t n = s.size();
        if (!trace.times.empty() && n != snapshots.front().size()) {
            throw DomainError("track_interfaces: snapshots are not on a common grid");
        }
        trace.times.push_back(s.time());
        std::size_t first = n;
        std::size_t last = 0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i] > eps) {
                first = std::min(first, i);
                last = i;
            }
            if (u[i] > u[arg]) {
                arg = i;
            }
        }
        trace.max_value.push_back(n ? u[arg] : 0.0);
        trace.argmax.push_back(n ? x[arg] : 0.0);
        if (first == n) {
            trace.left_edge.emplace_back();
            trace.right_edge.emplace_back();
            continue;
        }
        if (first == 0) {
            trace.left_edge.emplace_back();
        } else {
            const double w = (eps - u[first - 1]) / (u[first] - u[first - 1]);
            trace.left_edge.emplace_back(x[first - 1] + w * (x[first] - x[first - 1]));
        }
        if (last + 1 == n) {
            trace.right_edge.emplace_back();
        } else {
            const double w = (u[last] - eps) / (u[last] - u[last + 1]);
            trace.right_edge.emplace_back(x[last] + w * (x[last + 1] - x[last]));
        }
    }
    return trace;
}

inline InterfaceTrace track_interfaces(const RunResult& result, double eps) {
    return track_interfaces(std::span<const GridFunction>(result.snapshots), eps);
}

enum class EdgeModel { LogEdge, PowerLawEdge };

/// Fraction of the trace's time span used by edge fits.
struct FitWindow {
    double start = 0.75;
    double end = 0.95;
};

struct FitReport {
    std::string model;
    double estimate = 0.0;
    double width = 0.0;
    double residual_norm = 0.0;
    Interval window;
    std::size_t points = 0;
    std::optional<double> blowup_time;
    std::vector<double> coefficients;
};

namespace detail {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ssr = 0.0;
    double slope_se = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw FitError("linear fit: abscissae are all equal");
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        f.ssr += r * r;
    }
    f.slope_se = n > 2 ? std::sqrt(f.ssr / static_cast<double>(n - 2) / sxx) : 0.0;
    return f;
}

// Minimizes g over [a, b]: coarse scan, then golden section around the best cell.
template <typename G>
double scan_golden(const G& g, double a, double b, int coarse = 200, int iters = 120) {
    double best = a;
    double best_val = std::numeric_limits<double>::infinity();
    const double h = (b - a) / coarse;
    for (int i = 0; i <= coarse; ++i) {
        const double u = a + h * i;
        const double val = g(u);
        if (val < best_val) {
            best_val = val;
            best = u;
        }
    }
    double lo = std::max(a, best - h);
    double hi = std::min(b, best + h);
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - r * (hi - lo);
    double d = lo + r * (hi - lo);
    double gc = g(c);
    double gd = g(d);
    for (int i = 0; i < iters && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++i) {
        if (gc < gd) {
            hi = d;
            d = c;
            gd = gc;
            c = hi - r * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + r * (hi - lo);
            gd = g(d);
        }
    }
    const double mid = 0.5 * (lo + hi);
    return g(mid) <= best_val ? mid : best;
}

// Largest excursion from u_best (toward `limit`) with g(u) <= level.
template <typename G>
double profile_bound(const G& g, double u_best, double limit, double level) {
    if (g(limit) <= level) {
        return limit;
    }
    double inside = u_best;
    double outside = limit;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (inside + outside);
        (g(mid) <= level ? inside : outside) = mid;
    }
    return inside;
}

struct ShiftFit {
    double shift;
    LinearFit fit;
    double width;
};

// Fits y = a + b ln(sign (t - t0)) with t0 = anchor + sign * e^u, u free.
// sign = +1: singular time after the data; sign = -1: before the data.
inline ShiftFit fit_log_shift(std::span<const double> t, std::span<const double> y, double anchor,
                              double sign, double span) {
    std::vector<double> lx(t.size());
    auto ssr_at = [&](double u) {
        const double t0 = anchor + sign * std::exp(u);
        for (std::size_t i = 0; i < t.size(); ++i) {
            lx[i] = std::log(sign * (t0 - t[i]));
        }
        return linear_fit(lx, y).ssr;
    };
    const double a = std::log(1e-9 * span);
    const double b = std::log(4.0 * span);
    const double u = scan_golden(ssr_at, a, b);
    const double best = ssr_at(u);
    const double dof = static_cast<double>(t.size()) - 3.0;
    const double level = best * (1.0 + 4.0 / std::max(dof, 1.0)) + 1e-300;
    const double ulo = profile_bound(ssr_at, u, a, level);
    const double uhi = profile_bound(ssr_at, u, b, level);
    ShiftFit out;
    out.shift = anchor + sign * std::exp(u);
    ssr_at(u);
    out.fit = linear_fit(lx, y);
    out.width = std::exp(uhi) - std::exp(ulo);
    return out;
}

} // namespace detail

/// Fits an edge trajectory near escape. LogEdge: x = p ln(T - t) + q.
/// PowerLawEdge: |x| = p (T - t)^q against |x| = p (t - t_s)^q; the model with
/// the smaller residual wins, and only the blow-up model reports T.
inline FitReport estimate_blowup_time(const InterfaceTrace& trace, EdgeModel model, Side side,
                                      FitWindow window = {}) {
    std::vector<double> ts;
    std::vector<double> xs;
    const auto& edge = side == Side::Left ? trace.left_edge : trace.right_edge;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (edge[i]) {
            ts.push_back(trace.times[i]);
            xs.push_back(*edge[i]);
        }
    }
    if (ts.size() < 8) {
        throw FitError("estimate_blowup_time: need at least 8 points with a present edge");
    }
    const double t0 = ts.front();
    const double t1 = ts.back();
    const double span = t1 - t0;
    const double wa = t0 + window.start * span;
    const double wb = t0 + window.end * span;
    std::vector<double> wt;
    std::vector<double> wx;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] >= wa && ts[i] <= wb) {
            wt.push_back(ts[i]);
            wx.push_back(xs[i]);
        }
    }
    if (wt.size() < 8) {
        throw FitError("estimate_blowup_time: fewer than 8 points inside the fit window");
    }
    FitReport report;
    report.window = {wt.front(), wt.back()};
    report.points = wt.size();
    const double n = static_cast<double>(wt.size());

    if (model == EdgeModel::LogEdge) {
        const auto fit = detail::fit_log_shift(wt, wx, t1, 1.0, span);
        report.model = "LogEdge";
        report.estimate = fit.shift;
        report.blowup_time = fit.shift;
        report.width = fit.width;
        report.residual_norm = std::sqrt(fit.fit.ssr / n);
        report.coefficients = {fit.fit.slope, fit.fit.intercept, fit.shift};
        return report;
    }

    std::vector<double> ly(wx.size());
    for (std::size_t i = 0; i < wx.size(); ++i) {
        if (!(std::abs(wx[i]) > 0.0)) {
            throw FitError("estimate_blowup_time: PowerLawEdge needs a nonzero edge");
        }
        ly[i] = std::log(std::abs(wx[i]));
    }
    const auto blow = detail::fit_log_shift(wt, ly, t1, 1.0, span);
    const auto grow = detail::fit_log_shift(wt, ly, t0, -1.0, span);
    if (blow.fit.ssr < grow.fit.ssr) {
        report.model = "PowerLawEdge(blow-up)";
        report.estimate = blow.shift;
        report.blowup_time = blow.shift;
        report.width = blow.width;
        report.residual_norm = std::sqrt(blow.fit.ssr / n);
        report.coefficients = {std::exp(blow.fit.intercept), blow.fit.slope, blow.shift};
    } else {
        report.model = "PowerLawEdge(spreading)";
        report.estimate = grow.fit.slope;
        report.width = 2.0 * grow.fit.slope_se;
        report.residual_norm = std::sqrt(grow.fit.ssr / n);
        report.coefficients = {std::exp(grow.fit.intercept), grow.fit.slope, grow.shift};
    }
    return report;
}

/// Slope of ln A against ln(T - t).
inline FitReport fit_rate_exponent(std::span<const std::pair<double, double>> series, double T) {
    if (series.size() < 6) {
        throw FitError("fit_rate_exponent: need at least 6 points");
    }
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& [t, a] : series) {
        if (!(a > 0.0)) {
            throw DomainError("fit_rate_exponent: amplitudes must be positive");
        }
        if (!(t < T)) {
            throw DomainError("fit_rate_exponent: all times must precede the pivot");
        }
        lx.push_back(std::log(T - t));
        ly.push_back(std::log(a));
    }
    const auto fit = detail::linear_fit(lx, ly);
    FitReport report;
    report.model = "RateExponent";
    report.estimate = fit.slope;
    report.width = 2.0 * fit.slope_se;
    report.residual_norm = std::sqrt(fit.ssr / static_cast<double>(lx.size()));
    report.window = {series.front().first, series.back().first};
    report.points = series.size();
    report.coefficients = {fit.slope, fit.intercept};
    return report;
}

struct IsothermalLimit {
    double theta_bar = 0.0;
    double weighted_mass = 0.0;   // integral of theta0 f dy
    double density_integral = 0.0; // integral of f over the line
    double tail_bound = 0.0;       // truncated tail of the density integral
    GridFunction profile;          // e^(-x/2m) cos(w x/2)^(1/m) theta_bar
};

/// theta_bar = (int theta0 f dy) / (int f dy) on the mapped line, and the
/// corresponding limit profile on initial_u's grid.
inline IsothermalLimit isothermal_limit(const ModelParams& params, const GridFunction& initial_u,
                                        std::size_t density_nodes = 400001,
                                        double truncation = 1e4) {
    if (classify_regime(params) != Regime::Super) {
        throw DomainError("isothermal_limit: needs K > 1/4");
    }
    const auto map = build_transform(params);
    const double m = params.m();
    const double w = std::sqrt(4.0 * params.K() - 1.0);
    const auto x = initial_u.nodes();
    const auto u = initial_u.values();
    const std::size_t n = initial_u.size();

    std::size_t first = n;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] > 0.0) {
            first = std::min(first, i);
            last = i;
        }
    }
    IsothermalLimit out;
    if (first < n) {
        const std::size_t lo = first > 0 ? first - 1 : 0;
        const std::size_t hi = std::min(n - 1, last + 1);
        if (!map.x_domain.contains_open(x[lo]) || !map.x_domain.contains_open(x[hi]) ||
            u[lo] > 0.0 || u[hi] > 0.0) {
            throw DomainError("isothermal_limit: initial support touches the interval ends");
        }
        std::vector<double> ys;
        std::vector<double> hs;
        for (std::size_t i = lo; i <= hi; ++i) {
            const double y = map.space_map(x[i]);
            ys.push_back(y);
            hs.push_back(map.amplitude(x[i]) * u[i] * map.density(y));
        }
        out.weighted_mass = quad::trapezoid(ys, hs);
    }

    // density integral on y = tan(s), s uniform, plus the power-law tails
    const double s_max = std::atan(truncation);
    std::vector<double> ys(density_nodes);
    std::vector<double> fs(density_nodes);
    for (std::size_t j = 0; j < density_nodes; ++j) {
        const double s = -s_max + 2.0 * s_max * static_cast<double>(j) /
                                      static_cast<double>(density_nodes - 1);
        ys[j] = std::tan(s);
        fs[j] = map.density(ys[j]);
    }
    const double p = (3.0 * m + 1.0) / m;
    const double tail = truncation * (map.density(truncation) + map.density(-truncation)) / (p - 1.0);
    out.density_integral = quad::trapezoid(ys, fs) + tail;
    out.tail_bound = tail;
    out.theta_bar = out.weighted_mass / out.density_integral;

    std::vector<double> prof(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::max(0.0, std::cos(0.5 * w * x[i]));
        prof[i] = std::exp(-x[i] / (2.0 * m)) * std::pow(c, 1.0 / m) * out.theta_bar;
    }
    out.profile = GridFunction(std::vector<double>(x.begin(), x.end()), std::move(prof),
                               initial_u.time());
    return out;
}

struct EscapeOptions {
    double t_final = 1e6;
    SolverConfig config; // contact stops are overridden: left free, right stops
    BoundaryCondition left = ZeroFlux{};
    bool parallel = true;
};

struct EscapeRun {
    double y_max = 0.0;
    std::optional<double> escape_time;
    RunResult result;
};

/// Runs f = y^(-gamma) theta_tau = (theta^m)_yy on [y_L, y_max] for each y_max
/// (options.left at y_L, Dirichlet0 right; y_L and dx from theta0's grid) and records
/// the time the right interface reaches y_max.
inline std::vector<EscapeRun> interface_blowup_experiment(double m, double gamma,
                                                          const GridFunction& theta0,
                                                          std::span<const double> y_max_schedule,
                                                          const EscapeOptions& options = {}) {
    if (theta0.size() < 3) {
        throw DomainError("interface_blowup_experiment: theta0 needs at least three nodes");
    }
    const double dx = detail::grid_spacing(theta0.nodes());
    const double y_lo = theta0.nodes().front();
    if (!(y_lo > 0.0)) {
        throw DomainError("interface_blowup_experiment: grid must start at y > 0");
    }
    if (theta0.values().back() > 0.0) {
        throw DomainError("interface_blowup_experiment: theta0 must vanish at its right end");
    }
    for (std::size_t i = 1; i < y_max_schedule.size(); ++i) {
        if (!(y_max_schedule[i] > y_max_schedule[i - 1])) {
            throw DomainError("interface_blowup_experiment: y_max schedule must increase");
        }
    }

    auto run_one = [&, m, gamma, dx, y_lo](double y_max) {
        if (!(y_max > theta0.nodes().back() - 0.5 * dx)) {
            throw DomainError("interface_blowup_experiment: y_max inside theta0's grid");
        }
        const auto cells = static_cast<std::size_t>(std::llround((y_max - y_lo) / dx));
        std::vector<double> nodes(cells + 1);
        std::vector<double> values(cells + 1, 0.0);
        for (std::size_t i = 0; i <= cells; ++i) {
            nodes[i] = y_lo + dx * static_cast<double>(i);
            if (i < theta0.size()) {
                values[i] = theta0.values()[i];
            }
        }
        const PdeSpec spec{power_density_equation(m, gamma), {nodes.front(), nodes.back()},
                           options.left, Dirichlet0{}};
        SolverConfig cfg = options.config;
        cfg.stop_on_left_contact = false;
        cfg.stop_on_right_contact = true;
        EscapeRun run;
        run.y_max = nodes.back();
        run.result = solve(spec, GridFunction(std::move(nodes), std::move(values), theta0.time()),
                           options.t_final, cfg);
        if (const auto* hit = std::get_if<InterfaceHitBoundary>(&run.result.stop_reason)) {
            if (hit->side == Side::Right) {
                run.escape_time = hit->time;
            }
        }
        return run;
    };

    std::vector<EscapeRun> runs;
    if (options.parallel) {
        std::vector<std::future<EscapeRun>> jobs;
        for (double y : y_max_schedule) {
            jobs.push_back(std::async(std::launch::async, run_one, y));
        }
        for (auto& j : jobs) {
            runs.push_back(j.get());
        }
    } else {
        for (double y : y_max_schedule) {
            runs.push_back(run_one(y));
        }
    }
    return runs;
}

} // namespace rcd
