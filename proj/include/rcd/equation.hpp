#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <variant>

namespace rcd {

/// u_t = (u^m)_xx + (u^m)_x + K u^m
struct ReactionConvection {
    double m = 2.0;
    double K = 0.0;
};

/// f(y) theta_tau = (theta^m)_yy
struct Nonhomogeneous {
    double m = 2.0;
    std::function<double(double)> density;
    std::string density_label = "f";
};

using EquationKind = std::variant<ReactionConvection, Nonhomogeneous>;

inline Nonhomogeneous power_density_equation(double m, double gamma) {
    return {m, [gamma](double y) { return std::pow(y, -gamma); },
            "y^(-" + std::to_string(gamma) + ")"};
}

inline double exponent_of(const EquationKind& kind) {
    return std::visit([](const auto& k) { return k.m; }, kind);
}

} // namespace rcd
