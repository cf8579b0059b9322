#pragma once

// Coefficient algebra and solution-level maps between
//     u_t = (u^m)_xx + a(x) (u^m)_x + b(x) u^m
// and the nonhomogeneous porous medium equation
//     f(y) theta_tau = (theta^m)_yy .
//
// Naming note: Eigenvalues::gap is the spacing lambda2 - lambda1 of the
// characteristic roots. It is unrelated to the self-similar speed that the
// analysis module fits in the critical regime.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcd/errors.hpp"
#include "rcd/grid.hpp"
#include "rcd/quadrature.hpp"

namespace rcd {

using RealFn = std::function<double(double)>;

enum class Regime { Sub, Critical, Super };

inline std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::Sub: return "Sub";
    case Regime::Critical: return "Critical";
    case Regime::Super: return "Super";
    }
    return "?";
}

/// Diffusion exponent plus either constant (a = 1, b = K) coefficients or
/// general coefficient functions a(x), b(x).
class ModelParams {
public:
    static ModelParams constant(double m, double K) {
        check_m(m);
        if (!std::isfinite(K)) {
            throw DomainError("K must be finite");
        }
        ModelParams p;
        p.m_ = m;
        p.K_ = K;
        return p;
    }

    static ModelParams general(double m, RealFn a, RealFn b) {
        check_m(m);
        if (!a || !b) {
            throw DomainError("general coefficients a(x), b(x) must be callable");
        }
        ModelParams p;
        p.m_ = m;
        p.a_ = std::move(a);
        p.b_ = std::move(b);
        return p;
    }

    double m() const { return m_; }
    bool is_general() const { return static_cast<bool>(a_); }

    double K() const {
        if (is_general()) {
            throw UnsupportedModeError("K is undefined in general-coefficient mode");
        }
        return K_;
    }
    const RealFn& a() const { return a_; }
    const RealFn& b() const { return b_; }

private:
    ModelParams() = default;

    static void check_m(double m) {
        if (!(m > 1.0) || !std::isfinite(m)) {
            throw DomainError("diffusion exponent m must satisfy m > 1");
        }
    }

    double m_ = 2.0;
    double K_ = 0.0;
    RealFn a_;
    RealFn b_;
};

/// Sub / Critical / Super by the sign of 1 - 4K. Critical needs
/// |K - 1/4| <= delta_K; the default tolerance is an exact comparison.
inline Regime classify_regime(const ModelParams& params, double delta_K = 0.0) {
    if (params.is_general()) {
        throw UnsupportedModeError("regime classification needs constant coefficients");
    }
    const double K = params.K();
    if (std::abs(K - 0.25) <= delta_K) {
        return Regime::Critical;
    }
    return K < 0.25 ? Regime::Sub : Regime::Super;
}

/// Roots of lambda^2 + lambda + K. For Super the real parts are stored in
/// lambda1/lambda2 and the imaginary part of lambda2 in imag.
struct Eigenvalues {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double gap = 0.0;  // lambda2 - lambda1 (real part)
    double imag = 0.0; // sqrt(4K - 1) / 2 when complex

    double gap_imag() const { return 2.0 * imag; }
};

inline Eigenvalues eigenvalues(const ModelParams& params) {
    if (params.is_general()) {
        throw UnsupportedModeError("eigenvalues need constant coefficients");
    }
    const double K = params.K();
    Eigenvalues e;
    const double disc = 1.0 - 4.0 * K;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        e.lambda1 = -0.5 * (1.0 + s);
        // Vieta form avoids cancellation in (-1 + s) / 2 for small K.
        e.lambda2 = K / e.lambda1;
        e.gap = s;
    } else if (disc == 0.0) {
        e.lambda1 = e.lambda2 = -0.5;
    } else {
        e.lambda1 = e.lambda2 = -0.5;
        e.imag = 0.5 * std::sqrt(-disc);
    }
    return e;
}

enum class Branch { Minus, Plus };

/// Density exponent gamma of y^(-gamma) produced from K < 1/4. The minus
/// branch is the direct map; the plus branch comes from the reflected
/// equation (x -> -x). The two branches sum to (3m+1)/m.
inline double gamma_of_K(double m, double K, Branch branch) {
    if (!(m > 1.0)) {
        throw DomainError("gamma_of_K: m must exceed 1");
    }
    if (!(K < 0.25)) {
        throw DomainError("gamma_of_K: requires K < 1/4");
    }
    const double s = std::sqrt(1.0 - 4.0 * K);
    const double base = (3.0 * m + 1.0) / m;
    const double shift = (m - 1.0) / (m * s);
    return 0.5 * (branch == Branch::Minus ? base - shift : base + shift);
}

inline double K_of_gamma(double m, double gamma) {
    if (!(m > 1.0)) {
        throw DomainError("K_of_gamma: m must exceed 1");
    }
    const double den = 2.0 * m * gamma - (3.0 * m + 1.0);
    if (den == 0.0) {
        throw PoleError("K_of_gamma: pole at gamma = (3m+1)/(2m)");
    }
    return m * (gamma - 2.0) * (m * gamma - m - 1.0) / (den * den);
}

/// theta(y(x), c_tau t) = amplitude(x) * u(x, t), with f(y) theta_tau = (theta^m)_yy.
struct TransformMap {
    std::optional<Regime> regime; // empty for maps built from a general ODE basis
    double m = 2.0;
    RealFn space_map;
    RealFn inverse_map;
    RealFn amplitude;
    RealFn density;
    double time_scale = 1.0;
    Interval x_domain;
    Interval y_domain;
    bool reversed = false; // space_map decreasing: left/right interfaces swap
    std::optional<double> density_exponent; // gamma when f(y) = y^(-gamma)
    std::string density_description;
};

inline TransformMap build_transform(const ModelParams& params, double delta_K = 0.0) {
    const Regime regime = classify_regime(params, delta_K);
    const double m = params.m();
    const double K = params.K();
    TransformMap map;
    map.regime = regime;
    map.m = m;

    switch (regime) {
    case Regime::Sub: {
        const Eigenvalues e = eigenvalues(params);
        const double lam = e.gap;
        const double l1 = e.lambda1;
        const double gamma = gamma_of_K(m, K, Branch::Minus);
        map.space_map = [lam](double x) { return std::exp(lam * x); };
        map.inverse_map = [lam](double y) { return std::log(y) / lam; };
        map.amplitude = [l1, m](double x) { return std::exp(-l1 * x / m); };
        map.density = [gamma](double y) { return std::pow(y, -gamma); };
        map.time_scale = lam * lam;
        map.y_domain = {0.0, std::numeric_limits<double>::infinity()};
        map.density_exponent = gamma;
        map.density_description = "y^(-gamma)";
        break;
    }
    case Regime::Critical: {
        const double c = (m - 1.0) / (2.0 * m);
        map.space_map = [c](double x) { return -c * x; };
        map.inverse_map = [c](double y) { return -y / c; };
        map.amplitude = [m](double x) { return std::exp(x / (2.0 * m)); };
        map.density = [](double y) { return std::exp(-y); };
        map.time_scale = c * c;
        map.reversed = true;
        map.density_description = "exp(-y)";
        break;
    }
    case Regime::Super: {
        const double w = std::sqrt(4.0 * K - 1.0);
        const double pref = 4.0 / (w * w);
        const double tilt = (m - 1.0) / (m * w);
        const double decay = (3.0 * m + 1.0) / (2.0 * m);
        map.space_map = [w](double x) { return std::tan(0.5 * w * x); };
        map.inverse_map = [w](double y) { return 2.0 * std::atan(y) / w; };
        map.amplitude = [w, m](double x) {
            return std::exp(x / (2.0 * m)) * std::pow(std::cos(0.5 * w * x), -1.0 / m);
        };
        map.density = [pref, tilt, decay](double y) {
            return pref * std::exp(tilt * std::atan(y)) * std::pow(1.0 + y * y, -decay);
        };
        map.time_scale = 1.0;
        map.x_domain = {-std::numbers::pi / w, std::numbers::pi / w};
        map.density_description =
            "4/(4K-1)*exp((m-1)*atan(y)/(m*sqrt(4K-1)))*(1+y^2)^(-(3m+1)/(2m))";
        break;
    }
    }
    return map;
}

enum class Direction { Forward, Inverse };

/// Forward: u(x, t) on x-nodes -> theta(y, tau) on y-nodes. Inverse undoes it.
/// Nodes are re-sorted ascending when the space map is decreasing.
inline GridFunction map_solution(const TransformMap& map, const GridFunction& snapshot,
                                 Direction direction) {
    const auto nodes = snapshot.nodes();
    const auto values = snapshot.values();
    std::vector<std::pair<double, double>> out;
    out.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (direction == Direction::Forward) {
            const double x = nodes[i];
            if (!map.x_domain.contains_open(x)) {
                throw DomainError("map_solution: node " + std::to_string(i) + " (x = " +
                                  std::to_string(x) + ") outside the map's x-domain");
            }
            out.emplace_back(map.space_map(x), map.amplitude(x) * values[i]);
        } else {
            const double y = nodes[i];
            if (!map.y_domain.contains_open(y)) {
                throw DomainError("map_solution: node " + std::to_string(i) + " (y = " +
                                  std::to_string(y) + ") outside the map's y-domain");
            }
            const double x = map.inverse_map(y);
            if (!map.x_domain.contains_open(x)) {
                throw DomainError("map_solution: node " + std::to_string(i) +
                                  " maps outside the x-domain");
            }
            out.emplace_back(x, values[i] / map.amplitude(x));
        }
    }
    if (map.reversed) {
        std::reverse(out.begin(), out.end());
    }
    std::vector<double> xs(out.size());
    std::vector<double> vs(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        xs[i] = out[i].first;
        vs[i] = out[i].second;
    }
    const double t = direction == Direction::Forward ? snapshot.time() * map.time_scale
                                                     : snapshot.time() / map.time_scale;
    return GridFunction(std::move(xs), std::move(vs), t);
}

/// A solution of the stationary ODE s'' + a s' + b s = 0 with its derivative.
struct BasisFunction {
    RealFn value;
    RealFn derivative;
};

namespace detail {

inline Interval sampling_window(Interval d) {
    double lo = d.lo;
    double hi = d.hi;
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
        lo = -20.0;
        hi = 20.0;
    } else if (!std::isfinite(lo)) {
        lo = hi - 40.0;
    } else if (!std::isfinite(hi)) {
        hi = lo + 40.0;
    }
    const double pad = 1e-6 * (hi - lo);
    return {lo + pad, hi - pad};
}

// Monotone inverse of y(x) on an open interval by bracketing + bisection.
inline double invert_monotone(const RealFn& y_of_x, double y, Interval dom, bool increasing) {
    auto below = [&](double x) {
        const double v = y_of_x(x);
        return increasing ? v < y : v > y;
    };
    double lo;
    double hi;
    if (dom.bounded()) {
        lo = std::nextafter(dom.lo, dom.hi);
        hi = std::nextafter(dom.hi, dom.lo);
    } else {
        const double c = std::isfinite(dom.lo) ? dom.lo + 1.0
                         : std::isfinite(dom.hi) ? dom.hi - 1.0
                                                 : 0.0;
        lo = c;
        hi = c;
        double step = 1.0;
        while (below(lo) == false && step < 1e4) {
            lo = std::isfinite(dom.lo) ? std::max(c - step, std::nextafter(dom.lo, dom.hi))
                                       : c - step;
            step *= 2.0;
        }
        step = 1.0;
        while (below(hi) == true && step < 1e4) {
            hi = std::isfinite(dom.hi) ? std::min(c + step, std::nextafter(dom.hi, dom.lo))
                                       : c + step;
            step *= 2.0;
        }
    }
    if (below(hi) || !below(lo)) {
        if (y_of_x(lo) == y) {
            return lo;
        }
        if (y_of_x(hi) == y) {
            return hi;
        }
        throw DomainError("inverse map: value " + std::to_string(y) + " not in the image");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (below(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Transformation built from two independent solutions w, v of the
/// stationary ODE: y = v/w, theta = u / w^(1/m), f(y) = w^((3m+1)/m) / W^2,
/// W = w v' - w' v. The inverse space map is computed numerically.
inline TransformMap general_transform_from_ode_basis(const ModelParams& params,
                                                     const BasisFunction& w,
                                                     const BasisFunction& v, Interval x_domain,
                                                     std::optional<Interval> y_domain = {},
                                                     std::size_t samples = 64) {
    const double m = params.m();
    auto wronskian = [w, v](double x) {
        return w.value(x) * v.derivative(x) - w.derivative(x) * v.value(x);
    };
    const Interval win = detail::sampling_window(x_domain);
    double sign = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x =
            win.lo + (win.hi - win.lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
        if (!(w.value(x) > 0.0)) {
            throw SignError("basis function w must be positive (fails at x = " +
                            std::to_string(x) + ")");
        }
        const double W = wronskian(x);
        if (!(std::abs(W) > 0.0) || !std::isfinite(W) || (sign != 0.0 && W * sign < 0.0)) {
            throw DegenerateError("Wronskian vanishes or changes sign near x = " +
                                  std::to_string(x));
        }
        sign = W > 0.0 ? 1.0 : -1.0;
    }

    TransformMap map;
    map.m = m;
    map.x_domain = x_domain;
    map.y_domain = y_domain.value_or(Interval{});
    map.time_scale = 1.0;
    map.reversed = sign < 0.0;
    map.space_map = [w, v](double x) { return v.value(x) / w.value(x); };
    map.amplitude = [w, m](double x) { return std::pow(w.value(x), -1.0 / m); };
    const bool increasing = !map.reversed;
    auto y_of_x = map.space_map;
    map.inverse_map = [y_of_x, x_domain, increasing](double y) {
        return detail::invert_monotone(y_of_x, y, x_domain, increasing);
    };
    auto inv = map.inverse_map;
    map.density = [w, wronskian, inv, m](double y) {
        const double x = inv(y);
        const double W = wronskian(x);
        return std::pow(w.value(x), (3.0 * m + 1.0) / m) / (W * W);
    };
    map.density_description = "w^((3m+1)/m)/W^2";
    return map;
}

/// Both sides of Abel's identity W(x)/W(x0) = exp(-int_{x0}^{x} a).
struct AbelCheck {
    double wronskian_ratio;
    double exp_integral;
};

inline AbelCheck abel_check(const RealFn& a, const BasisFunction& w, const BasisFunction& v,
                            double x0, double x, double step = 0.0) {
    auto W = [&](double s) { return w.value(s) * v.derivative(s) - w.derivative(s) * v.value(s); };
    const double h = step > 0.0 ? step : 1e-3 * std::max(std::abs(x - x0), 1e-12);
    return {W(x) / W(x0), std::exp(-quad::simpson(a, x0, x, h))};
}

/// Self-map of y^(-gamma) theta_tau = (theta^m)_yy onto the radial porous
/// medium equation in (fractional) dimension N:
///     theta(y, tau) = y^(1/m) w(y^mu, mu^2 tau).
struct RadialSelfMap {
    double m;
    double gamma;
    double mu;
    double N;

    template <typename Radial>
    double theta_from_radial(const Radial& radial, double y, double tau) const {
        return std::pow(y, 1.0 / m) * radial(std::pow(y, mu), mu * mu * tau);
    }

    template <typename Theta>
    double radial_from_theta(const Theta& theta, double r, double s) const {
        return std::pow(r, -1.0 / (m * mu)) * theta(std::pow(r, 1.0 / mu), s / (mu * mu));
    }
};

inline RadialSelfMap self_map_to_radial(double m, double gamma) {
    if (!(m > 1.0)) {
        throw DomainError("self_map_to_radial: m must exceed 1");
    }
    const double mu = ((1.0 - gamma) * m + 1.0) / (2.0 * m);
    if (!(mu > 0.0)) {
        throw DegenerateError("self_map_to_radial: mu <= 0 (needs gamma < (m+1)/m)");
    }
    return {m, gamma, mu, 2.0 + 1.0 / mu};
}

/// theta_hat(y) = y0^alpha theta(y y0), alpha = (gamma - 2)/(m - 1): the image of
/// spatial translation under the sub-critical map.
inline GridFunction rescale_solution(double m, double gamma, double y0,
                                     const GridFunction& snapshot) {
    if (!(m > 1.0)) {
        throw DomainError("rescale_solution: m must exceed 1");
    }
    if (!(y0 > 0.0)) {
        throw DomainError("rescale_solution: y0 must be positive");
    }
    const double scale = std::pow(y0, (gamma - 2.0) / (m - 1.0));
    std::vector<double> nodes(snapshot.size());
    std::vector<double> values(snapshot.size());
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        nodes[i] = snapshot.nodes()[i] / y0;
        values[i] = snapshot.values()[i] * scale;
    }
    return GridFunction(std::move(nodes), std::move(values), snapshot.time());
}

/// Reduction of w_s = ... + c(s) w to the c = 0 equation: w(x, s) = f(s) u(x, g(s)),
/// f' = c f, f(0) = 1, g' = f^(m-1), g(0) = 0. Both are tabulated with
/// cumulative Simpson panels on [0, horizon].
class TimeReaction {
public:
    TimeReaction(double m, RealFn c, double horizon, double step)
        : m_(m), c_(std::move(c)), h_(step) {
        if (!(m > 1.0)) {
            throw DomainError("reduce_time_reaction: m must exceed 1");
        }
        if (!(horizon > 0.0) || !(step > 0.0)) {
            throw DomainError("reduce_time_reaction: horizon and step must be positive");
        }
        const auto n = static_cast<std::size_t>(std::ceil(horizon / step));
        h_ = horizon / static_cast<double>(n);
        logf_.assign(n + 1, 0.0);
        g_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = h_ * static_cast<double>(i);
            logf_[i + 1] = logf_[i] + panel_log(s, h_);
            const double fa = std::exp(logf_[i]);
            const double fm = std::exp(logf_[i] + panel_log(s, 0.5 * h_));
            const double fb = std::exp(logf_[i + 1]);
            g_[i + 1] = g_[i] + h_ / 6.0 *
                                    (std::pow(fa, m_ - 1.0) + 4.0 * std::pow(fm, m_ - 1.0) +
                                     std::pow(fb, m_ - 1.0));
        }
    }

    double horizon() const { return h_ * static_cast<double>(logf_.size() - 1); }

    double f(double s) const {
        const auto [i, r] = locate(s);
        return std::exp(logf_[i] + panel_log(node(i), r));
    }

    double g(double s) const {
        const auto [i, r] = locate(s);
        if (r == 0.0) {
            return g_[i];
        }
        const double base = logf_[i];
        auto pw = [&](double len) { return std::pow(std::exp(base + panel_log(node(i), len)), m_ - 1.0); };
        return g_[i] + r / 6.0 * (pw(0.0) + 4.0 * pw(0.5 * r) + pw(r));
    }

private:
    double node(std::size_t i) const { return h_ * static_cast<double>(i); }

    // int_{s}^{s+len} c by one Simpson panel
    double panel_log(double s, double len) const {
        if (len == 0.0) {
            return 0.0;
        }
        return len / 6.0 * (c_(s) + 4.0 * c_(s + 0.5 * len) + c_(s + len));
    }

    std::pair<std::size_t, double> locate(double s) const {
        if (!(s >= 0.0) || s > horizon() * (1.0 + 1e-12)) {
            throw DomainError("TimeReaction: s outside [0, horizon]");
        }
        auto i = static_cast<std::size_t>(std::floor(s / h_));
        i = std::min(i, logf_.size() - 1);
        return {i, std::max(0.0, s - node(i))};
    }

    double m_;
    RealFn c_;
    double h_;
    std::vector<double> logf_;
    std::vector<double> g_;
};

/// Default step is 1e-3 of the horizon.
inline TimeReaction reduce_time_reaction(double m, RealFn c, double horizon,
                                         std::optional<double> step = {}) {
    return TimeReaction(m, std::move(c), horizon, step.value_or(1e-3 * horizon));
}

} // namespace rcd
