#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace pbh::test {

/// Central differences at h, h/2, h/4 combined by two Richardson steps (error O(h^6)).
inline double richardson(const std::function<double(double)>& f, double t0, double h = 1e-2) {
    const auto central = [&](double s) { return (f(t0 + s) - f(t0 - s)) / (2.0 * s); };
    const double d1 = central(h);
    const double d2 = central(h / 2);
    const double d3 = central(h / 4);
    const double r1 = (4.0 * d2 - d1) / 3.0;
    const double r2 = (4.0 * d3 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

/// d/dx_i of a scalar function of a point.
inline double partial(const std::function<double(std::span<const double>)>& f, std::span<const double> x, int i,
                      double h = 1e-2) {
    std::vector<double> y(x.begin(), x.end());
    const double xi = y[static_cast<std::size_t>(i)];
    return richardson(
        [&](double t) {
            y[static_cast<std::size_t>(i)] = t;
            return f(y);
        },
        xi, h);
}

inline double mixed_gap(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

inline std::vector<double> uniform_point(std::mt19937_64& rng, int dim, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> x;
    for (int i = 0; i < dim; ++i) x.push_back(u(rng));
    return x;
}

} // namespace pbh::test
