#pragma once

// Closed-form solution families. The first three solve y^(-gamma) theta_tau =
// (theta^m)_yy on the half-line (gamma = 0 for the translated Barenblatt
// profile); the Transformed* families are their images under the
// sub-critical map and solve u_t = (u^m)_xx + (u^m)_x + K u^m on the line.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "rcd/equation.hpp"
#include "rcd/errors.hpp"
#include "rcd/grid.hpp"

namespace rcd {

namespace detail {

// b_+^e evaluated as exp(e log b); brackets below 1e-300 are treated as zero.
inline double positive_part_pow(double bracket, double exponent) {
    if (!(bracket > 1e-300)) {
        return 0.0;
    }
    return std::exp(exponent * std::log(bracket));
}

inline void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive");
    }
}

inline void require_m(double m) {
    if (!(m > 1.0) || !std::isfinite(m)) {
        throw DomainError("m must satisfy m > 1");
    }
}

inline void require_gamma(double m, double gamma) {
    if (gamma == 2.0) {
        throw DomainError("gamma = 2 is excluded (pole in the self-similar exponents)");
    }
    if (gamma == (m + 1.0) / m) {
        throw DomainError("gamma = (m+1)/m is excluded (pole in the self-similar exponents)");
    }
    if (!(gamma < (m + 1.0) / m)) {
        throw DomainError("gamma-families need gamma < (m+1)/m");
    }
}

inline void require_time(double t) {
    if (!(t > 0.0)) {
        throw DomainError("exact solutions are evaluated at positive times only");
    }
}

inline void require_half_line(double y) {
    if (y < 0.0) {
        throw DomainError("half-line family evaluated at a negative point");
    }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Characteristic-root data for the sub-critical map whose density exponent
// is gamma: sqrt(1 - 4K) = (m - 1)/(3m + 1 - 2 m gamma).
struct SubRoots {
    double K;
    double lambda;
    double lambda1;
    double lambda2;
};

inline SubRoots sub_roots_of_gamma(double m, double gamma) {
    const double s = (m - 1.0) / (3.0 * m + 1.0 - 2.0 * m * gamma);
    const double den = 2.0 * m * gamma - (3.0 * m + 1.0);
    return {m * (gamma - 2.0) * (m * gamma - m - 1.0) / (den * den), s, -0.5 * (1.0 + s),
            -0.5 * (1.0 - s)};
}

} // namespace detail

/// Support of a snapshot; either end may be infinite.
using Support = Interval;

struct CriticalTimes {
    std::optional<double> focus_time;
    std::optional<double> blowup_time;
};

/// tau^(-1/(m+1)) [C - k (y - y0)^2 / tau^(2/(m+1))]_+^(1/(m-1)), k = (m-1)/(2m(m+1)).
struct TranslatedBarenblatt {
    double m;
    double C;
    double y0;
    double k;

    TranslatedBarenblatt(double m_, double C_, double y0_) : m(m_), C(C_), y0(y0_) {
        detail::require_m(m);
        detail::require_positive(C, "C");
        detail::require_positive(y0, "y0");
        k = (m - 1.0) / (2.0 * m * (m + 1.0));
    }

    static constexpr std::string_view name = "translated-barenblatt";

    double eval(double y, double tau) const {
        detail::require_time(tau);
        detail::require_half_line(y);
        const double d = y - y0;
        const double br = C - k * d * d / std::pow(tau, 2.0 / (m + 1.0));
        return std::pow(tau, -1.0 / (m + 1.0)) * detail::positive_part_pow(br, 1.0 / (m - 1.0));
    }

    double radius(double tau) const { return std::sqrt(C / k) * std::pow(tau, 1.0 / (m + 1.0)); }

    Support support(double tau) const {
        detail::require_time(tau);
        const double r = radius(tau);
        return {std::max(0.0, y0 - r), y0 + r};
    }

    /// Time at which the left interface reaches y = 0.
    double focus_time() const { return std::pow(k * y0 * y0 / C, 0.5 * (m + 1.0)); }

    CriticalTimes critical_times() const { return {focus_time(), std::nullopt}; }

    EquationKind equation() const { return power_density_equation(m, 0.0); }
};

/// tau^(-alpha) [C - k (y / tau^beta)^(2-gamma)]_+^(1/(m-1)).
struct BarenblattGamma {
    double m;
    double C;
    double gamma;
    double alpha;
    double beta;
    double k;

    BarenblattGamma(double m_, double C_, double gamma_) : m(m_), C(C_), gamma(gamma_) {
        detail::require_m(m);
        detail::require_positive(C, "C");
        detail::require_gamma(m, gamma);
        const double q = m + 1.0 - m * gamma;
        alpha = (1.0 - gamma) / q;
        beta = 1.0 / q;
        k = (m - 1.0) / (m * (2.0 - gamma) * q);
    }

    static constexpr std::string_view name = "barenblatt-gamma";

    double eval(double y, double tau) const {
        detail::require_time(tau);
        detail::require_half_line(y);
        const double br = C - k * std::pow(y / std::pow(tau, beta), 2.0 - gamma);
        return std::pow(tau, -alpha) * detail::positive_part_pow(br, 1.0 / (m - 1.0));
    }

    Support support(double tau) const {
        detail::require_time(tau);
        return {0.0, std::pow(C / k, 1.0 / (2.0 - gamma)) * std::pow(tau, beta)};
    }

    CriticalTimes critical_times() const { return {}; }

    EquationKind equation() const { return power_density_equation(m, gamma); }
};

/// Dipole: tau^(-a) y^(1/m) [C - k (y / tau^(1/(m(2-gamma))))^((m+1-m gamma)/m)]_+^(1/(m-1))
/// with a = (2m + 1 - m gamma)/(m^2 (2 - gamma)), the exponent forced by the
/// scaling a (m - 1) + (2 - gamma)/(m (2 - gamma)) = 1 of the equation.
struct DipoleGamma {
    double m;
    double C;
    double gamma;
    double time_exponent;
    double spread; // 1/(m(2-gamma))
    double power;  // (m+1-m gamma)/m
    double k;

    DipoleGamma(double m_, double C_, double gamma_) : m(m_), C(C_), gamma(gamma_) {
        detail::require_m(m);
        detail::require_positive(C, "C");
        detail::require_gamma(m, gamma);
        const double q = m + 1.0 - m * gamma;
        time_exponent = (2.0 * m + 1.0 - m * gamma) / (m * m * (2.0 - gamma));
        spread = 1.0 / (m * (2.0 - gamma));
        power = q / m;
        k = (m - 1.0) / (m * (2.0 - gamma) * q);
    }

    static constexpr std::string_view name = "dipole-gamma";

    double eval(double y, double tau) const {
        detail::require_time(tau);
        detail::require_half_line(y);
        const double br = C - k * std::pow(y / std::pow(tau, spread), power);
        return std::pow(tau, -time_exponent) * std::pow(y, 1.0 / m) *
               detail::positive_part_pow(br, 1.0 / (m - 1.0));
    }

    Support support(double tau) const {
        detail::require_time(tau);
        return {0.0, std::pow(C / k, 1.0 / power) * std::pow(tau, spread)};
    }

    CriticalTimes critical_times() const { return {}; }

    EquationKind equation() const { return power_density_equation(m, gamma); }
};

/// Image of TranslatedBarenblatt under the sub-critical map with
/// K = 2m(m+1)/(3m+1)^2 (the K whose density exponent is 0).
struct TransformedB0 {
    double m;
    double C;
    double y0;
    double K;
    double lambda;
    double lambda1;
    double k;
    double x0; // ln(y0)/lambda

    TransformedB0(double m_, double C_, double y0_) : m(m_), C(C_), y0(y0_) {
        detail::require_m(m);
        detail::require_positive(C, "C");
        detail::require_positive(y0, "y0");
        const auto roots = detail::sub_roots_of_gamma(m, 0.0);
        K = roots.K;
        lambda = roots.lambda;
        lambda1 = roots.lambda1;
        k = (m - 1.0) / (2.0 * m * (m + 1.0));
        x0 = std::log(y0) / lambda;
    }

    static constexpr std::string_view name = "transformed-b0";

    double eval(double x, double t) const {
        detail::require_time(t);
        const double scale = std::pow(t, 1.0 / (m + 1.0)) * std::pow(lambda, 2.0 / (m + 1.0));
        const double d = (std::exp(lambda * x) - std::exp(lambda * x0)) / scale;
        return std::pow(lambda, -2.0 / (m + 1.0)) * std::pow(t, -1.0 / (m + 1.0)) *
               std::exp(lambda1 * x / m) * detail::positive_part_pow(C - k * d * d, 1.0 / (m - 1.0));
    }

    Support support(double t) const {
        detail::require_time(t);
        const double r = std::sqrt(C / k) * std::pow(lambda * lambda * t, 1.0 / (m + 1.0));
        const double yl = y0 - r;
        return {yl > 0.0 ? std::log(yl) / lambda : -detail::kInf, std::log(y0 + r) / lambda};
    }

    /// T^(1/(m+1)) = e^(lambda x0) / (lambda^(2/(m+1)) sqrt(C/k)).
    double blowup_time() const {
        const double root = std::exp(lambda * x0) /
                            (std::pow(lambda, 2.0 / (m + 1.0)) * std::sqrt(C / k));
        return std::pow(root, m + 1.0);
    }

    CriticalTimes critical_times() const { return {std::nullopt, blowup_time()}; }

    EquationKind equation() const { return ReactionConvection{m, K}; }
};

/// Image of BarenblattGamma under the sub-critical map.
struct TransformedB {
    double m;
    double C;
    double gamma;
    double K;
    double lambda;
    double lambda1;
    double alpha;
    double beta;
    double k;

    TransformedB(double m_, double C_, double gamma_) : m(m_), C(C_), gamma(gamma_) {
        const BarenblattGamma base(m_, C_, gamma_);
        const auto roots = detail::sub_roots_of_gamma(m, gamma);
        K = roots.K;
        lambda = roots.lambda;
        lambda1 = roots.lambda1;
        alpha = base.alpha;
        beta = base.beta;
        k = base.k;
    }

    static constexpr std::string_view name = "transformed-b";

    double eval(double x, double t) const {
        detail::require_time(t);
        const double z = std::exp(lambda * x) / (std::pow(t, beta) * std::pow(lambda, 2.0 * beta));
        return std::pow(lambda, -2.0 * alpha) * std::pow(t, -alpha) * std::exp(lambda1 * x / m) *
               detail::positive_part_pow(C - k * std::pow(z, 2.0 - gamma), 1.0 / (m - 1.0));
    }

    Support support(double t) const {
        detail::require_time(t);
        const double yr =
            std::pow(C / k, 1.0 / (2.0 - gamma)) * std::pow(t, beta) * std::pow(lambda, 2.0 * beta);
        return {-detail::kInf, std::log(yr) / lambda};
    }

    CriticalTimes critical_times() const { return {}; }

    EquationKind equation() const { return ReactionConvection{m, K}; }
};

/// Image of DipoleGamma under the sub-critical map.
struct TransformedZ {
    double m;
    double C;
    double gamma;
    double K;
    double lambda;
    double lambda2;
    double nu;
    double omega;
    double power;
    double k;

    TransformedZ(double m_, double C_, double gamma_) : m(m_), C(C_), gamma(gamma_) {
        const DipoleGamma base(m_, C_, gamma_);
        const auto roots = detail::sub_roots_of_gamma(m, gamma);
        K = roots.K;
        lambda = roots.lambda;
        lambda2 = roots.lambda2;
        nu = base.time_exponent;
        omega = m * (2.0 - gamma);
        power = base.power;
        k = base.k;
    }

    static constexpr std::string_view name = "transformed-z";

    double eval(double x, double t) const {
        detail::require_time(t);
        const double z =
            std::exp(lambda * x) / (std::pow(t, 1.0 / omega) * std::pow(lambda, 2.0 / omega));
        return std::pow(lambda, -2.0 * nu) * std::pow(t, -nu) * std::exp(lambda2 * x / m) *
               detail::positive_part_pow(C - k * std::pow(z, power), 1.0 / (m - 1.0));
    }

    Support support(double t) const {
        detail::require_time(t);
        const double yr = std::pow(C / k, 1.0 / power) * std::pow(t, 1.0 / omega) *
                          std::pow(lambda, 2.0 / omega);
        return {-detail::kInf, std::log(yr) / lambda};
    }

    CriticalTimes critical_times() const { return {}; }

    EquationKind equation() const { return ReactionConvection{m, K}; }
};

/// Tagged closed-form family, evaluable at any (point, time > 0).
class ExactSolution {
public:
    using Family = std::variant<TranslatedBarenblatt, BarenblattGamma, DipoleGamma, TransformedB0,
                                TransformedB, TransformedZ>;

    ExactSolution(Family family) : family_(std::move(family)) {}

    static ExactSolution translated_barenblatt(double m, double C, double y0) {
        return Family{TranslatedBarenblatt(m, C, y0)};
    }
    static ExactSolution barenblatt_gamma(double m, double C, double gamma) {
        return Family{BarenblattGamma(m, C, gamma)};
    }
    static ExactSolution dipole_gamma(double m, double C, double gamma) {
        return Family{DipoleGamma(m, C, gamma)};
    }
    static ExactSolution transformed_b0(double m, double C, double y0) {
        return Family{TransformedB0(m, C, y0)};
    }
    static ExactSolution transformed_b(double m, double C, double gamma) {
        return Family{TransformedB(m, C, gamma)};
    }
    static ExactSolution transformed_z(double m, double C, double gamma) {
        return Family{TransformedZ(m, C, gamma)};
    }

    double eval(double point, double time) const {
        return std::visit([&](const auto& f) { return f.eval(point, time); }, family_);
    }
    double operator()(double point, double time) const { return eval(point, time); }

    Support support(double time) const {
        return std::visit([&](const auto& f) { return f.support(time); }, family_);
    }

    CriticalTimes critical_times() const {
        return std::visit([](const auto& f) { return f.critical_times(); }, family_);
    }

    EquationKind equation() const {
        return std::visit([](const auto& f) { return f.equation(); }, family_);
    }

    double m() const {
        return std::visit([](const auto& f) { return f.m; }, family_);
    }

    std::string_view name() const {
        return std::visit([](const auto& f) { return f.name; }, family_);
    }

    /// True for the families posed on y >= 0.
    bool half_line() const { return family_.index() < 3; }

    const Family& family() const { return family_; }

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&family_);
    }

private:
    Family family_;
};

} // namespace rcd
