#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rcd/errors.hpp"

namespace rcd {

/// Open or closed real interval; infinite endpoints allowed.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains_open(double x) const { return x > lo && x < hi; }
    bool contains_closed(double x) const { return x >= lo && x <= hi; }
    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    double length() const { return hi - lo; }
};

/// One snapshot of a nonnegative field on a strictly increasing 1D grid.
class GridFunction {
public:
    GridFunction() = default;

    GridFunction(std::vector<double> nodes, std::vector<double> values, double time)
        : nodes_(std::move(nodes)), values_(std::move(values)), time_(time) {
        if (nodes_.size() != values_.size()) {
            throw DomainError("GridFunction: nodes and values differ in length");
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!std::isfinite(nodes_[i])) {
                throw DomainError("GridFunction: non-finite node at index " + std::to_string(i));
            }
            if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
                throw DomainError("GridFunction: nodes not strictly increasing at index " +
                                  std::to_string(i));
            }
            if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
                throw DomainError("GridFunction: value at index " + std::to_string(i) +
                                  " is negative or not finite");
            }
        }
    }

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> values() const { return values_; }
    double time() const { return time_; }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    double max_value() const {
        return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
    }

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
    double time_ = 0.0;
};

/// n equally spaced nodes from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) {
        throw DomainError("linspace: need at least two nodes");
    }
    std::vector<double> x(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = lo + h * static_cast<double>(i);
    }
    x.back() = hi;
    return x;
}

/// Uniform grid on [lo, hi] whose spacing is the largest value <= dx that
/// divides the interval evenly.
inline std::vector<double> uniform_grid(double lo, double hi, double dx) {
    if (!(hi > lo) || !(dx > 0.0)) {
        throw DomainError("uniform_grid: need lo < hi and dx > 0");
    }
    const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / dx - 1e-9));
    return linspace(lo, hi, std::max<std::size_t>(cells, 1) + 1);
}

/// Samples a callable on the given nodes.
template <typename F>
GridFunction sample(const F& field, std::vector<double> nodes, double time) {
    std::vector<double> values(nodes.size());
    std::transform(nodes.begin(), nodes.end(), values.begin(),
                   [&](double x) { return field(x, time); });
    return GridFunction(std::move(nodes), std::move(values), time);
}

} // namespace rcd
