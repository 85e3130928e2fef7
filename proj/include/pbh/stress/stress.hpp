#pragma once

#include "pbh/mapcalc/smooth_map.hpp"

#include <span>
#include <vector>

namespace pbh {

/// S_{2,p}(d_i, d_j) at one point with the scalars that enter it.
struct StressTensorValue {
    std::vector<double> base_point;
    double p = 2.0;
    Matrix<double> s;
    double tau_p_squared = 0.0; // |tau_p|^2
    double inner = 0.0;         // <dphi, nabla tau_p>
    double weight = 1.0;        // |dphi|^{p-2}
};

/**
 * S_{2,p}(X, Y) = -1/2 |tau_p|^2 g(X,Y) - |dphi|^{p-2} <dphi, nabla tau_p> g(X,Y)
 *               + |dphi|^{p-2} h(dphi X, nabla_Y tau_p) + |dphi|^{p-2} h(dphi Y, nabla_X tau_p)
 *               + (p-2) |dphi|^{p-4} <dphi, nabla tau_p> h(dphi X, dphi Y).
 * Jet version: order K-2 for map jets of order K.
 */
Matrix<Jet> stress_tensor_jets(const MapJets& jets, double p);
StressTensorValue stress_tensor(const SmoothMap& map, std::span<const double> x, double p);

double stress_trace(const SmoothMap& map, std::span<const double> x, double p);

/// The direct trace next to its two closed forms.
struct StressTrace {
    double direct = 0.0;
    double inner_form = 0.0; // -(m/2)|tau_p|^2 + (p-m)|dphi|^{p-2}<dphi, nabla tau_p>
    double theta_form = 0.0; // (m/2 - p)|tau_p|^2 + (p-m) div theta
    double div_theta = 0.0;
    double tau_p_squared = 0.0;
};

StressTrace stress_trace_forms(const SmoothMap& map, std::span<const double> x, double p);

struct ThetaForm {
    std::vector<double> base_point;
    std::vector<double> components; // theta(d_i) = h(|dphi|^{p-2} dphi(d_i), tau_p)
};

ThetaForm theta(const SmoothMap& map, std::span<const double> x, double p);
/// div of the vector field dual to theta.
double theta_divergence(const SmoothMap& map, std::span<const double> x, double p);

struct StressDivergence {
    std::vector<double> div_s; // (div S)(d_k)
    std::vector<double> rhs;   // -h(tau_{2,p}, dphi(d_k))
    double gap = 0.0;          // max_k |div_s - rhs|
    double scale = 0.0;        // max_k max(|div_s|, |rhs|)
};

StressDivergence stress_divergence_check(const SmoothMap& map, std::span<const double> x, double p);

/// Bienergy stress tensor -1/2|tau|^2 g - <dphi, nabla tau> g + h(dphi X, nabla_Y tau) + h(dphi Y, nabla_X tau),
/// evaluated through the point-level tension field and pull-back derivatives.
Matrix<double> classical_stress_bienergy(const SmoothMap& map, std::span<const double> x);

} // namespace pbh
