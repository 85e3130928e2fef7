#include "pbh/mapcalc/energy.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

namespace pbh {

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw ConfigError("quadrature order must be >= 1");
    std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
        gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)), &gsl_integration_glfixed_table_free);
    if (!table) throw ConfigError("cannot build a Gauss-Legendre table of order " + std::to_string(order));
    QuadratureRule rule;
    for (int i = 0; i < order; ++i) {
        double xi = 0.0;
        double wi = 0.0;
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &xi, &wi, table.get());
        rule.nodes.push_back(xi);
        rule.weights.push_back(wi);
    }
    return rule;
}

double integrate_box(const Box& box, int order, const std::function<double(std::span<const double>)>& f) {
    const int d = box.dim();
    if (static_cast<int>(box.upper.size()) != d) throw ConfigError("box bounds have mismatched dimensions");
    const QuadratureRule rule = gauss_legendre(order);
    std::vector<double> half(static_cast<std::size_t>(d));
    std::vector<double> mid(static_cast<std::size_t>(d));
    double jac = 1.0;
    for (int k = 0; k < d; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        half[ku] = 0.5 * (box.upper[ku] - box.lower[ku]);
        mid[ku] = 0.5 * (box.upper[ku] + box.lower[ku]);
        jac *= half[ku];
    }

    // Odometer over the order^d grid, last axis fastest.
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const auto node = static_cast<std::size_t>(idx[ku]);
            x[ku] = mid[ku] + half[ku] * rule.nodes[node];
            w *= rule.weights[node];
        }
        sum += w * f(x);
        int k = d - 1;
        while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == order) idx[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) break;
    }
    return jac * sum;
}

double volume_density(const ChartMetric& chart, std::span<const double> x) {
    return std::sqrt(determinant_spd(chart.metric(x)));
}

double p_energy_box(const SmoothMap& map, const Box& box, double p, int order) {
    return integrate_box(box, order, [&](std::span<const double> x) {
        const double q = energy_density_squared(local_jets(map, x, 0)).value();
        return std::pow(q, 0.5 * p) / p * volume_density(map.source(), x);
    });
}

double p_bienergy_box(const SmoothMap& map, const Box& box, double p, int order) {
    return integrate_box(box, order, [&](std::span<const double> x) {
        const auto tp = p_tension(map, x, p);
        const Matrix<double> h = map.target().metric(map(x));
        return 0.5 * bilinear(h, tp, tp) * volume_density(map.source(), x);
    });
}

} // namespace pbh
