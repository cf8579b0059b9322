#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>

#include "rcd/analysis.hpp"
#include "rcd/exact.hpp"
#include "rcd/solver.hpp"

using namespace rcd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GridFunction sample(const std::vector<double>& nodes, double t, const std::function<double(double)>& f) {
    std::vector<double> v(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        v[i] = f(nodes[i]);
    }
    return GridFunction(nodes, v, t);
}

double min_value(const GridFunction& g) {
    return *std::min_element(g.values().begin(), g.values().end());
}

PdeSpec flat_density(double m, Interval d, BoundaryCondition l, BoundaryCondition r) {
    return PdeSpec{Nonhomogeneous{m, [](double) { return 1.0; }, "1"}, d, std::move(l), std::move(r)};
}

// max |numerical - exact| over nodes in [a, b] at the final snapshot of a B_gamma(gamma=1, m=2) run
double bgamma_error(double dx) {
    const BarenblattGamma bg(2.0, 3.0, 1.0);
    const auto nodes = uniform_grid(0.5, 16.0, dx);
    const PdeSpec spec{power_density_equation(2.0, 1.0), {nodes.front(), nodes.back()},
                       DirichletValue{[bg](double t) { return bg.eval(0.5, t); }}, Dirichlet0{}};
    SolverConfig cfg;
    cfg.stop_on_left_contact = false;
    const auto r = solve(spec, sample(nodes, 1.0, [&](double y) { return bg.eval(y, 1.0); }), 2.0, cfg);
    const auto& s = r.snapshots.back();
    REQUIRE(s.time() == 2.0);
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double y = s.nodes()[i];
        if (y >= 0.75 && y <= 5.0) {
            err = std::max(err, std::abs(s.values()[i] - bg.eval(y, 2.0)));
        }
    }
    return err;
}

} // namespace

TEST_CASE("stable_dt") {
    const auto nodes = uniform_grid(0.0, 1.0, 0.01);
    const auto spec = PdeSpec{ReactionConvection{2.0, 0.0}, {0.0, 1.0}};
    SolverConfig cfg;

    SECTION("zero state gives dt_max") {
        CHECK(stable_dt(spec, sample(nodes, 0.0, [](double) { return 0.0; }), cfg) == cfg.dt_max);
        cfg.dt_max = 0.5;
        CHECK(stable_dt(spec, sample(nodes, 0.0, [](double) { return 0.0; }), cfg) == 0.5);
    }
    SECTION("formula value") {
        const auto s = sample(nodes, 0.0, [](double x) { return x * (1.0 - x) * 4.0; });
        CHECK_THAT(stable_dt(spec, s, cfg), WithinRel(0.4 * 1e-4 / 4.02, 1e-9));
        CHECK_THAT(stable_dt(spec, s, cfg), WithinAbs(9.95e-6, 5e-9));
    }
    SECTION("reaction and density enter the bound") {
        const auto s = sample(nodes, 0.0, [](double) { return 1.0; });
        const PdeSpec rk{ReactionConvection{2.0, 3.0}, {0.0, 1.0}};
        CHECK_THAT(stable_dt(rk, s, cfg), WithinRel(0.4 * 1e-4 / (4.0 + 0.02 + 3e-4), 1e-9));
        const PdeSpec nh{Nonhomogeneous{2.0, [](double) { return 2.0; }, "2"}, {0.0, 1.0}};
        CHECK_THAT(stable_dt(nh, s, cfg), WithinRel(0.4 * 1e-4 * 2.0 / 4.0, 1e-9));
    }
    SECTION("halving dx shrinks dt by about four") {
        auto bump = [](double x) { return std::max(0.0, 1.0 - 16.0 * (x - 0.5) * (x - 0.5)); };
        const double d1 = stable_dt(spec, sample(uniform_grid(0.0, 1.0, 0.01), 0.0, bump), cfg);
        const double d2 = stable_dt(spec, sample(uniform_grid(0.0, 1.0, 0.005), 0.0, bump), cfg);
        CHECK(d1 / d2 >= 3.9);
        CHECK(d1 / d2 <= 4.1);
    }
}

TEST_CASE("input validation") {
    const auto nodes = uniform_grid(0.0, 1.0, 0.1);
    const auto spec = PdeSpec{ReactionConvection{2.0, 0.0}, {0.0, 1.0}};
    SolverConfig cfg;
    CHECK_THROWS_AS(solve(spec, sample(nodes, 0.0, [](double) { return 1.0; }), 1.0, cfg), DomainError);
    cfg.cfl_safety = 1.5;
    CHECK_THROWS_AS(solve(spec, sample(nodes, 0.0, [](double) { return 0.0; }), 1.0, cfg), DomainError);
    cfg.cfl_safety = 0.4;
    const PdeSpec wrong{ReactionConvection{2.0, 0.0}, {0.0, 2.0}};
    CHECK_THROWS_AS(solve(wrong, sample(nodes, 0.0, [](double) { return 0.0; }), 1.0, cfg), DomainError);
    const PdeSpec bad_density{power_density_equation(2.0, 1.0), {0.0, 1.0}};
    CHECK_THROWS_AS(solve(bad_density, sample(nodes, 0.0, [](double) { return 0.0; }), 1.0, cfg),
                    DomainError);
}

TEST_CASE("zero data stays zero") {
    const auto nodes = uniform_grid(-5.0, 5.0, 0.05);
    const auto spec = PdeSpec{ReactionConvection{2.0, 0.2}, {-5.0, 5.0}};
    SolverConfig cfg;
    cfg.snapshot_times = {0.25, 0.5, 1.0};
    const auto r = solve(spec, sample(nodes, 0.0, [](double) { return 0.0; }), 1.0, cfg);
    CHECK(std::holds_alternative<ReachedFinalTime>(r.stop_reason));
    REQUIRE(r.snapshots.size() == 4);
    for (const auto& s : r.snapshots) {
        CHECK(s.max_value() == 0.0);
    }
    CHECK(r.snapshots.back().time() == 1.0);
}

TEST_CASE("snapshots land on the schedule and are strictly increasing") {
    const auto nodes = uniform_grid(0.0, 10.0, 0.05);
    const auto spec = flat_density(2.0, {0.0, 10.0}, Dirichlet0{}, Dirichlet0{});
    SolverConfig cfg;
    cfg.snapshot_times = {0.3, 0.1, 0.2, 0.2, 5.0};
    const auto r = solve(spec, sample(nodes, 0.0, [](double x) { return std::max(0.0, 1.0 - (x - 5.0) * (x - 5.0)); }),
                         0.35, cfg);
    REQUIRE(r.snapshots.size() == 5);
    const std::vector<double> want = {0.0, 0.1, 0.2, 0.3, 0.35};
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(r.snapshots[i].time() == want[i]);
    }
    CHECK(r.stats.count > 0);
    CHECK(r.stats.dt_min <= r.stats.dt_max);
}

TEST_CASE("linear v is stationary with held boundary values") {
    const double a = 1.0;
    const double b = 0.5;
    const auto nodes = uniform_grid(0.0, 4.0, 0.05);
    // theta^2 linear in y
    auto theta = [&](double y) { return std::sqrt(a + b * y); };
    const auto spec = flat_density(2.0, {0.0, 4.0}, DirichletValue{[&](double) { return theta(0.0); }},
                                   DirichletValue{[&](double) { return theta(4.0); }});
    SolverConfig cfg;
    const auto r = solve(spec, sample(nodes, 0.0, theta), 1.0, cfg);
    const auto& s = r.snapshots.back();
    double drift = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        drift = std::max(drift, std::abs(s.values()[i] - theta(s.nodes()[i])));
    }
    CHECK(drift <= 0.05 * 0.05);
    CHECK(std::holds_alternative<ReachedFinalTime>(r.stop_reason));
}

TEST_CASE("translated Barenblatt comparison away from the interfaces") {
    const TranslatedBarenblatt tb(3.0, 1.0, 5.0);
    auto run = [&](double dx) {
        const auto nodes = uniform_grid(0.01, 20.0, dx);
        const PdeSpec spec{power_density_equation(3.0, 0.0), {nodes.front(), nodes.back()}};
        const auto r = solve(spec, sample(nodes, 1.0, [&](double y) { return tb.eval(y, 1.0); }), 2.0, {});
        const auto& s = r.snapshots.back();
        REQUIRE(s.time() == 2.0);
        const auto sup = tb.support(2.0);
        double interior = 0.0;
        double full = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double y = s.nodes()[i];
            const double e = std::abs(s.values()[i] - tb.eval(y, 2.0));
            full = std::max(full, e);
            if (y > sup.lo + 0.5 && y < sup.hi - 0.5) {
                interior = std::max(interior, e);
            }
        }
        return std::pair{interior, full};
    };
    const auto [i1, f1] = run(0.02);
    const auto [i2, f2] = run(0.01);
    CHECK(i1 <= 5e-3);
    CHECK(i2 <= 0.5 * i1);
    // the square-root edge limits the full-grid error to first order or worse
    CHECK(f1 <= 2e-2);
    CHECK(f2 <= 2e-2);
}

TEST_CASE("TransformedB0 left interface follows the closed form") {
    const TransformedB0 b0(3.0, 1.0, 5.0);
    const double dx = 0.05;
    const auto nodes = uniform_grid(-30.0, 20.0, dx);
    const PdeSpec spec{ReactionConvection{3.0, b0.K}, {-30.0, 20.0}};
    SolverConfig cfg;
    const double T = b0.blowup_time();
    for (double t = 2.0; t <= 0.5 * T; t += 2.0) {
        cfg.snapshot_times.push_back(t);
    }
    const auto init = sample(nodes, 1.0, [&](double x) { return b0.eval(x, 1.0); });
    const auto r = solve(spec, init, 0.5 * T, cfg);
    const auto trace = track_interfaces(r, r.threshold);
    std::vector<GridFunction> exact;
    for (const auto& s : r.snapshots) {
        exact.push_back(sample(nodes, s.time(), [&](double x) { return b0.eval(x, s.time()); }));
    }
    const auto ref = track_interfaces(std::span<const GridFunction>(exact), r.threshold);
    double worst = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        REQUIRE(trace.left_edge[i]);
        REQUIRE(ref.left_edge[i]);
        worst = std::max(worst, std::abs(*trace.left_edge[i] - *ref.left_edge[i]));
    }
    CHECK(trace.size() > 20);
    CHECK(worst <= 2.0 * dx);
    // the bracket edge itself moves left monotonically
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(*ref.left_edge[i] < *ref.left_edge[i - 1]);
    }
}

TEST_CASE("weighted mass, positivity and clamp audit") {
    const auto nodes = uniform_grid(0.5, 10.0, 0.05);
    const PdeSpec spec{power_density_equation(2.0, 1.0), {0.5, 10.0}, ZeroFlux{}, ZeroFlux{}};
    SolverConfig cfg;
    cfg.stop_on_left_contact = false;
    cfg.stop_on_right_contact = false;
    cfg.snapshot_times = {0.5, 1.0, 2.0, 4.0, 8.0};
    const auto init = sample(nodes, 0.0, [](double y) { return std::max(0.0, 1.0 - 4.0 * (y - 2.0) * (y - 2.0)); });
    const auto r = solve(spec, init, 8.0, cfg);
    CHECK(r.initial_weighted_mass == weighted_mass(spec, init));
    for (const auto& s : r.snapshots) {
        CHECK(std::abs(weighted_mass(spec, s) / r.initial_weighted_mass - 1.0) <= 1e-6);
        CHECK(min_value(s) >= 0.0);
    }
    CHECK(r.stats.clamped_mass <= 1e-8 * r.initial_weighted_mass);
}

TEST_CASE("support never shrinks for the nonhomogeneous equation") {
    const auto nodes = uniform_grid(0.5, 12.0, 0.05);
    const PdeSpec spec{power_density_equation(3.0, 0.5), {0.5, 12.0}};
    SolverConfig cfg;
    for (int i = 1; i <= 40; ++i) {
        cfg.snapshot_times.push_back(0.25 * i);
    }
    const auto init = sample(nodes, 0.0, [](double y) {
        const double s = std::max(0.0, 1.0 - (y - 4.0) * (y - 4.0));
        return s * s;
    });
    const auto r = solve(spec, init, 10.0, cfg);
    const auto trace = track_interfaces(r, r.threshold);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace.left_edge[i] && trace.left_edge[i - 1]) {
            CHECK(*trace.left_edge[i] <= *trace.left_edge[i - 1] + 0.05);
        }
        if (trace.right_edge[i] && trace.right_edge[i - 1]) {
            CHECK(*trace.right_edge[i] >= *trace.right_edge[i - 1] - 0.05);
        }
    }
    CHECK(*trace.right_edge.back() > *trace.right_edge.front() + 1.0);
}

TEST_CASE("interior error against B_gamma(gamma=1, m=2) converges") {
    const double e1 = bgamma_error(0.02);
    const double e2 = bgamma_error(0.01);
    INFO(e1 << " " << e2);
    CHECK(e1 <= 1e-6);
    CHECK(std::log2(e1 / e2) >= 1.5);
}

TEST_CASE("solutions below TransformedB stay below it") {
    const TransformedB tb(2.0, 1.0, 0.5);
    const auto nodes = uniform_grid(-20.0, 5.0, 0.05);
    const PdeSpec spec{ReactionConvection{2.0, tb.K}, {-20.0, 5.0}};
    SolverConfig cfg;
    cfg.stop_on_left_contact = false;
    for (int i = 1; i <= 20; ++i) {
        cfg.snapshot_times.push_back(1.0 + 0.2 * i);
    }
    const auto init = sample(nodes, 1.0, [&](double x) {
        const double cut = std::max(0.0, 1.0 - std::pow((x + 8.0) / 7.0, 2));
        return 0.9 * cut * tb.eval(x, 1.0);
    });
    const auto r = solve(spec, init, 5.0, cfg);
    CHECK(r.snapshots.size() > 10);
    double worst = -INFINITY;
    for (const auto& s : r.snapshots) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            worst = std::max(worst, s.values()[i] - tb.eval(s.nodes()[i], s.time()));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("stop reasons") {
    SECTION("interface reaching a Dirichlet boundary") {
        const auto nodes = uniform_grid(0.0, 4.0, 0.05);
        const auto spec = flat_density(2.0, {0.0, 4.0}, Dirichlet0{}, Dirichlet0{});
        const auto r = solve(spec, sample(nodes, 0.0, [](double x) { return std::max(0.0, 1.0 - (x - 2.0) * (x - 2.0)); }),
                             100.0, {});
        const auto* hit = std::get_if<InterfaceHitBoundary>(&r.stop_reason);
        REQUIRE(hit);
        CHECK(hit->time < 100.0);
        CHECK(r.snapshots.back().time() == hit->time);
        CHECK(describe(r.stop_reason).find("InterfaceHitBoundary") != std::string::npos);
    }
    SECTION("amplitude cap under strong reaction") {
        const auto nodes = uniform_grid(-3.0, 3.0, 0.05);
        const PdeSpec spec{ReactionConvection{2.0, 20.0}, {-3.0, 3.0}};
        SolverConfig cfg;
        cfg.amplitude_cap = 100.0;
        const auto r = solve(spec, sample(nodes, 0.0, [](double x) { return std::max(0.0, 1.0 - x * x); }), 50.0, cfg);
        const auto* cap = std::get_if<AmplitudeCap>(&r.stop_reason);
        REQUIRE(cap);
        CHECK(r.snapshots.back().max_value() >= 100.0);
        CHECK(r.snapshots.back().time() == cap->time);
    }
}
