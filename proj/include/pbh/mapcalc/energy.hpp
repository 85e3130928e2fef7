#pragma once

#include "pbh/mapcalc/smooth_map.hpp"

#include <functional>
#include <span>
#include <vector>

namespace pbh {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_legendre(int order);

/// Tensor-product Gauss-Legendre integral of f over the box (plain Lebesgue measure).
double integrate_box(const Box& box, int order, const std::function<double(std::span<const double>)>& f);

/// E_p(phi; D) = (1/p) int_D |dphi|^p v_g.
double p_energy_box(const SmoothMap& map, const Box& box, double p, int order = 8);
/// E_{2,p}(phi; D) = 1/2 int_D |tau_p(phi)|^2 v_g.
double p_bienergy_box(const SmoothMap& map, const Box& box, double p, int order = 8);

/// sqrt(det g) of the source metric at x.
double volume_density(const ChartMetric& chart, std::span<const double> x);

} // namespace pbh
