#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "rcd/errors.hpp"

namespace rcd::quad {

/// Composite Simpson on [a, b] with panel width at most h (panel count is
/// rounded up to an even number). Returns 0 when a == b; handles b < a.
template <typename F>
double simpson(const F& f, double a, double b, double h) {
    if (a == b) {
        return 0.0;
    }
    if (!(h > 0.0)) {
        throw DomainError("simpson: step must be positive");
    }
    auto n = static_cast<std::size_t>(std::ceil(std::abs(b - a) / h));
    n += n % 2;
    n = n < 2 ? 2 : n;
    const double step = (b - a) / static_cast<double>(n);
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double x = a + step * static_cast<double>(i);
        (i % 2 ? odd : even) += f(x);
    }
    return step / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

/// Trapezoid rule over sampled data on a (possibly nonuniform) grid.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DomainError("trapezoid: size mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    return s;
}

} // namespace rcd::quad
