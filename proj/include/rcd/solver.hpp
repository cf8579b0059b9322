#pragma once

// Explicit finite-difference solver for
//     u_t = (u^m)_xx + (u^m)_x + K u^m          (ReactionConvection)
//     f(y) theta_tau = (theta^m)_yy             (Nonhomogeneous)
// on a uniform grid. Diffusion is written in flux form so that, with
// zero-flux ends, sum_i f_i theta_i dx is conserved to round-off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rcd/equation.hpp"
#include "rcd/errors.hpp"
#include "rcd/grid.hpp"

namespace rcd {

struct Dirichlet0 {};
struct ZeroFlux {};
/// Prescribed boundary value g(t); used to pin exact-solution traces.
struct DirichletValue {
    std::function<double(double)> value;
};

using BoundaryCondition = std::variant<Dirichlet0, ZeroFlux, DirichletValue>;

struct PdeSpec {
    EquationKind kind;
    Interval domain;
    BoundaryCondition left = Dirichlet0{};
    BoundaryCondition right = Dirichlet0{};
};

struct SolverConfig {
    double cfl_safety = 0.4;
    std::optional<double> positivity_threshold; // default 1e-10 * initial max
    std::optional<double> amplitude_cap;        // default 1e6 * initial max
    double dt_max = 1e-2;
    std::vector<double> snapshot_times;
    bool stop_on_left_contact = true;
    bool stop_on_right_contact = true;
};

enum class Side { Left, Right };

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

struct ReachedFinalTime {};
struct AmplitudeCap {
    double time;
};
struct InterfaceHitBoundary {
    Side side;
    double time;
};

using StopReason = std::variant<ReachedFinalTime, AmplitudeCap, InterfaceHitBoundary>;

inline std::string describe(const StopReason& r) {
    struct V {
        std::string operator()(ReachedFinalTime) const { return "ReachedFinalTime"; }
        std::string operator()(const AmplitudeCap&) const { return "AmplitudeCap"; }
        std::string operator()(const InterfaceHitBoundary& h) const {
            return std::string("InterfaceHitBoundary(") + to_string(h.side) + ")";
        }
    };
    return std::visit(V{}, r);
}

struct StepStatistics {
    std::size_t count = 0;
    double dt_min = std::numeric_limits<double>::infinity();
    double dt_max = 0.0;
    double clamped_mass = 0.0; // sum of f_i |undershoot| dx over the run
};

struct RunResult {
    std::vector<GridFunction> snapshots; // first entry is the initial state
    StopReason stop_reason;
    StepStatistics stats;
    double threshold = 0.0;     // positivity threshold used for contact checks
    double initial_weighted_mass = 0.0;
};

namespace detail {

struct Discretization {
    double m = 2.0;
    double K = 0.0;
    bool convection = false;
    double dx = 0.0;
    std::vector<double> weight; // f_i (1 for ReactionConvection)

    double coefficient() const {
        return 2.0 * m + (convection ? dx * m : 0.0) + dx * dx * std::max(K, 0.0);
    }
};

inline double grid_spacing(std::span<const double> nodes) {
    if (nodes.size() < 3) {
        throw DomainError("solver: need at least three grid nodes");
    }
    const double dx = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (std::abs(nodes[i] - nodes[i - 1] - dx) > 1e-8 * dx) {
            throw DomainError("solver: grid is not uniform near node " + std::to_string(i));
        }
    }
    return dx;
}

inline Discretization discretize(const PdeSpec& spec, std::span<const double> nodes) {
    if (!(spec.domain.hi > spec.domain.lo)) {
        throw DomainError("PdeSpec: need x_L < x_R");
    }
    Discretization d;
    d.dx = grid_spacing(nodes);
    const double tol = 1e-9 * spec.domain.length();
    if (std::abs(nodes.front() - spec.domain.lo) > tol ||
        std::abs(nodes.back() - spec.domain.hi) > tol) {
        throw DomainError("solver: grid endpoints do not match the PDE domain");
    }
    d.weight.assign(nodes.size(), 1.0);
    if (const auto* rc = std::get_if<ReactionConvection>(&spec.kind)) {
        d.m = rc->m;
        d.K = rc->K;
        d.convection = true;
    } else {
        const auto& nh = std::get<Nonhomogeneous>(spec.kind);
        d.m = nh.m;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double f = nh.density(nodes[i]);
            if (!(f > 0.0) || !std::isfinite(f)) {
                throw DomainError("solver: density not positive and finite at x = " +
                                  std::to_string(nodes[i]));
            }
            d.weight[i] = f;
        }
    }
    if (!(d.m > 1.0)) {
        throw DomainError("solver: m must exceed 1");
    }
    return d;
}

inline double power(double u, double m) {
    if (u == 0.0) {
        return 0.0;
    }
    if (m == 2.0) {
        return u * u;
    }
    if (m == 3.0) {
        return u * u * u;
    }
    return std::pow(u, m);
}

inline double local_dt(const Discretization& d, std::span<const double> u, double sigma,
                       double dt_cap, std::size_t lo, std::size_t hi) {
    double worst = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        if (u[i] > 0.0) {
            worst = std::max(worst, power(u[i], d.m - 1.0) / d.weight[i]);
        }
    }
    constexpr double zeta = 1e-30;
    return std::min(dt_cap, sigma * d.dx * d.dx / (d.coefficient() * worst + zeta));
}

} // namespace detail

/// Largest stable explicit step for the current state:
///     dt = sigma * dx^2 / max_i [ (2m + dx m + dx^2 K_+) u_i^(m-1) / f_i ] ,
/// with the convection term present only for ReactionConvection, capped at dt_max.
inline double stable_dt(const PdeSpec& spec, const GridFunction& state,
                        const SolverConfig& config) {
    const auto d = detail::discretize(spec, state.nodes());
    return detail::local_dt(d, state.values(), config.cfl_safety, config.dt_max, 0, state.size());
}

inline double weighted_mass(const PdeSpec& spec, const GridFunction& state) {
    const auto d = detail::discretize(spec, state.nodes());
    double s = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        s += d.weight[i] * state.values()[i];
    }
    return s * d.dx;
}

inline RunResult solve(const PdeSpec& spec, const GridFunction& initial, double t_final,
                       const SolverConfig& config) {
    if (!(config.cfl_safety > 0.0 && config.cfl_safety <= 1.0)) {
        throw DomainError("solver: cfl_safety must lie in (0, 1]");
    }
    if (!(config.dt_max > 0.0)) {
        throw DomainError("solver: dt_max must be positive");
    }
    const auto disc = detail::discretize(spec, initial.nodes());
    const std::size_t n = initial.size();
    const double dx = disc.dx;
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_dx = 1.0 / dx;

    auto is_dirichlet0 = [](const BoundaryCondition& bc) {
        return std::holds_alternative<Dirichlet0>(bc);
    };
    if (is_dirichlet0(spec.left) && initial.values().front() != 0.0) {
        throw DomainError("solver: initial data must vanish at a Dirichlet0 boundary (left)");
    }
    if (is_dirichlet0(spec.right) && initial.values().back() != 0.0) {
        throw DomainError("solver: initial data must vanish at a Dirichlet0 boundary (right)");
    }

    const double initial_max = initial.max_value();
    const double eps = config.positivity_threshold.value_or(
        std::max(1e-10 * initial_max, std::numeric_limits<double>::min()));
    const double cap = config.amplitude_cap.value_or(
        initial_max > 0.0 ? 1e6 * initial_max : std::numeric_limits<double>::infinity());
    if (!(eps > 0.0)) {
        throw DomainError("solver: positivity threshold must be positive");
    }
    if (!(cap > initial_max)) {
        throw DomainError("solver: amplitude cap must exceed the initial maximum");
    }

    std::vector<double> schedule;
    for (double s : config.snapshot_times) {
        if (s > initial.time() && s <= t_final) {
            schedule.push_back(s);
        }
    }
    std::sort(schedule.begin(), schedule.end());
    schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());

    const std::vector<double> nodes(initial.nodes().begin(), initial.nodes().end());
    std::vector<double> u(initial.values().begin(), initial.values().end());
    std::vector<double> v(n, 0.0);
    std::vector<double> next(n, 0.0);

    RunResult result{{}, ReachedFinalTime{}, {}, eps, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        result.initial_weighted_mass += disc.weight[i] * u[i] * dx;
    }
    double t = initial.time();
    result.snapshots.push_back(initial);

    auto snapshot = [&](double time) {
        if (result.snapshots.back().time() != time) {
            result.snapshots.emplace_back(nodes, u, time);
        }
    };

    // contact probes: the first node that is free to become positive
    const std::size_t left_probe = is_dirichlet0(spec.left) ? 1 : 0;
    const std::size_t right_probe = is_dirichlet0(spec.right) ? n - 2 : n - 1;
    const bool left_pinned = std::holds_alternative<DirichletValue>(spec.left);
    const bool right_pinned = std::holds_alternative<DirichletValue>(spec.right);
    auto contact = [&]() -> std::optional<Side> {
        if (config.stop_on_left_contact && !left_pinned && u[left_probe] > eps) {
            return Side::Left;
        }
        if (config.stop_on_right_contact && !right_pinned && u[right_probe] > eps) {
            return Side::Right;
        }
        return std::nullopt;
    };
    if (auto side = contact()) {
        result.stop_reason = InterfaceHitBoundary{*side, t};
        return result;
    }

    // active window [lo, hi): nodes that may change this step
    auto active_range = [&]() {
        std::size_t first = n;
        std::size_t last = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i] > 0.0) {
                first = std::min(first, i);
                last = i;
            }
        }
        return std::pair{first, last};
    };
    auto [first, last] = active_range();
    if (left_pinned) {
        first = 0;
    }
    if (right_pinned) {
        last = n - 1;
        first = std::min(first, n - 1);
    }

    std::size_t next_snap = 0;
    const double time_tol = 1e-12 * std::max(1.0, std::abs(t_final));
    while (t < t_final - time_tol) {
        const bool any = first <= last && first < n;
        const std::size_t lo = any ? (first > 0 ? first - 1 : 0) : 0;
        const std::size_t hi = any ? std::min(n, last + 2) : 0;

        double dt = any ? detail::local_dt(disc, u, config.cfl_safety, config.dt_max, lo, hi)
                        : config.dt_max;
        double target = t_final;
        if (next_snap < schedule.size()) {
            target = std::min(target, schedule[next_snap]);
        }
        if (t + dt >= target - time_tol) {
            dt = target - t;
        }
        const double t_new = (t + dt >= target - time_tol) ? target : t + dt;

        if (any) {
            const std::size_t vlo = lo > 0 ? lo - 1 : 0;
            const std::size_t vhi = std::min(n, hi + 1);
            for (std::size_t i = vlo; i < vhi; ++i) {
                v[i] = detail::power(u[i], disc.m);
            }
            for (std::size_t i = lo; i < hi; ++i) {
                const double vl = i > 0 ? v[i - 1] : v[i];
                const double vr = i + 1 < n ? v[i + 1] : v[i];
                double rate = (vr - 2.0 * v[i] + vl) * inv_dx2;
                if (disc.convection) {
                    rate += (vr - v[i]) * inv_dx + disc.K * v[i];
                }
                next[i] = u[i] + dt * rate / disc.weight[i];
            }
            for (std::size_t i = lo; i < hi; ++i) {
                const double val = next[i];
                if (!std::isfinite(val)) {
                    throw NumericalFailure("solver: non-finite value at x = " +
                                           std::to_string(nodes[i]),
                                           result.stats.count);
                }
                if (val < 0.0) {
                    result.stats.clamped_mass += disc.weight[i] * (-val) * dx;
                    u[i] = 0.0;
                } else {
                    u[i] = val;
                }
            }
        }
        if (std::holds_alternative<Dirichlet0>(spec.left)) {
            u.front() = 0.0;
        } else if (const auto* bc = std::get_if<DirichletValue>(&spec.left)) {
            u.front() = bc->value(t_new);
        }
        if (std::holds_alternative<Dirichlet0>(spec.right)) {
            u.back() = 0.0;
        } else if (const auto* bc = std::get_if<DirichletValue>(&spec.right)) {
            u.back() = bc->value(t_new);
        }

        t = t_new;
        ++result.stats.count;
        result.stats.dt_min = std::min(result.stats.dt_min, dt);
        result.stats.dt_max = std::max(result.stats.dt_max, dt);

        if (any) {
            std::size_t nf = n;
            std::size_t nl = 0;
            double top = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                if (u[i] > 0.0) {
                    nf = std::min(nf, i);
                    nl = i;
                    top = std::max(top, u[i]);
                }
            }
            first = left_pinned ? 0 : nf;
            last = right_pinned ? n - 1 : nl;
            if (top > cap) {
                snapshot(t);
                result.stop_reason = AmplitudeCap{t};
                return result;
            }
        }
        if (auto side = contact()) {
            snapshot(t);
            result.stop_reason = InterfaceHitBoundary{*side, t};
            return result;
        }
        if (next_snap < schedule.size() && t >= schedule[next_snap] - time_tol) {
            snapshot(t);
            ++next_snap;
        }
    }
    snapshot(t);
    result.stop_reason = ReachedFinalTime{};
    return result;
}

} // namespace rcd
