#pragma once

#include "pbh/geometry/chart.hpp"

#include <functional>
#include <span>
#include <vector>

namespace pbh {

/**
 * phi : (M, g) -> (N, h) given by target-coordinate components phi^a(x_1..x_m).
 *
 * Components and their first and second partials are compiled into one tape. The
 * parameter table is shared with both charts; `with_parameters` rebinds all three.
 */
class SmoothMap {
public:
    SmoothMap(ChartMetric source, ChartMetric target, std::vector<Expression> components, Parameters params = {});

    const ChartMetric& source() const noexcept { return source_; }
    const ChartMetric& target() const noexcept { return target_; }
    int source_dim() const noexcept { return source_.dim(); }
    int target_dim() const noexcept { return target_.dim(); }
    const std::vector<Expression>& components() const noexcept { return components_; }
    const Parameters& parameters() const noexcept { return params_; }

    SmoothMap with_parameters(const Parameters& params) const;

    std::vector<double> operator()(std::span<const double> x) const;

    /// phi^a, dphi(a, i) = d_i phi^a, ddphi[a](i, j) = d_i d_j phi^a.
    template <class T>
    void evaluate(std::span<const T> x, std::vector<T>& phi, Matrix<T>* dphi, std::vector<Matrix<T>>* ddphi) const;

private:
    ChartMetric source_;
    ChartMetric target_;
    std::vector<Expression> components_;
    Parameters params_;
    std::shared_ptr<const Tape> tape_;
};

/**
 * Every primitive quantity of a map at one source point, as jets of order `order` in the
 * m source coordinates: the map and its first two partials, the source metric with its
 * Christoffel symbols, and the target metric with its Christoffel symbols at phi(x).
 *
 * Derived fields built from these lose one order per jet differentiation; the comments on
 * the kernels below state the resulting order.
 */
struct MapJets {
    const SmoothMap* map = nullptr; // not owned; jets are transient
    int m = 0;
    int n = 0;
    int order = 0;
    std::vector<double> x;
    std::vector<Jet> phi;
    Matrix<Jet> dphi; // n x m
    std::vector<Matrix<Jet>> ddphi;
    MetricAt<Jet> source;
    MetricAt<Jet> target;
};

MapJets local_jets(const SmoothMap& map, std::span<const double> x, int order);

/// A section of phi^{-1}TN. `rule(x, k)` returns target components as jets of order >= k at x.
struct FieldAlongMap {
    SmoothMap map;
    std::function<std::vector<Jet>(std::span<const double> x, int order)> rule;
};

// Jet kernels. K = jets.order.

/// h(u, v) with the target metric at phi(x).
Jet target_inner(const MapJets& jets, const std::vector<Jet>& u, const std::vector<Jet>& v);
/// dphi(d_i) as a target vector. Order K.
std::vector<Jet> differential_column(const MapJets& jets, int i);
/// |dphi|^2 = g^{ij} h_ab d_i phi^a d_j phi^b. Order K.
Jet energy_density_squared(const MapJets& jets);
/// (nabla dphi)^a_ij. Order K.
std::vector<Matrix<Jet>> hessian_of_map(const MapJets& jets);
/// tau^a = g^{ij} (nabla dphi)^a_ij. Order K.
std::vector<Jet> tension_jets(const MapJets& jets);
/// |dphi|^{p-2} tau + (p-2)|dphi|^{p-3} dphi(grad |dphi|). Order K-1.
std::vector<Jet> p_tension_jets(const MapJets& jets, double p);
/// nabla^phi_{d_i} V = d_i V + Gamma^N(phi) (d_i phi) V. Order ord(V)-1.
std::vector<Jet> covariant_derivative(const MapJets& jets, const std::vector<Jet>& v, int i);
/// g^{ij} (nabla^phi_{d_i} W_j - W(nabla^M_{d_i} d_j)) for a phi^{-1}TN-valued 1-form W. Order ord(W)-1.
std::vector<Jet> trace_covariant_divergence(const MapJets& jets, const std::vector<std::vector<Jet>>& w);
/// <nabla^phi V, dphi> = g^{ij} h(nabla^phi_i V, dphi(d_j)). Order ord(V)-1.
Jet pairing_with_differential(const MapJets& jets, const std::vector<Jet>& v);

/// Throws SingularityError when |dphi| vanishes at the base point.
void require_nonsingular(const MapJets& jets, const char* what);

// Point evaluations.

/// (i, a) entry is d_i phi^a (m x n).
Matrix<double> dmap(const SmoothMap& map, std::span<const double> x);
double dmap_norm(const SmoothMap& map, std::span<const double> x);
std::vector<Matrix<double>> second_fundamental_form_map(const SmoothMap& map, std::span<const double> x);
std::vector<double> tension(const SmoothMap& map, std::span<const double> x);
std::vector<double> p_tension(const SmoothMap& map, std::span<const double> x, double p);
/// div^M(|dphi|^{p-2} dphi), computed as a trace of covariant derivatives; equals p_tension.
std::vector<double> p_tension_divergence_form(const SmoothMap& map, std::span<const double> x, double p);
std::vector<double> pullback_derivative(const FieldAlongMap& field, int direction, std::span<const double> x);
std::vector<double> p_bitension(const SmoothMap& map, std::span<const double> x, double p);
/// p_bitension from precomputed jets of order >= 3.
std::vector<double> p_bitension_jets(const MapJets& jets, double p);

// Fields along the map.
FieldAlongMap tension_field(const SmoothMap& map);
FieldAlongMap p_tension_field(const SmoothMap& map, double p);
FieldAlongMap differential_field(const SmoothMap& map, int direction);
/// Components given as expressions in source coordinates.
FieldAlongMap expression_field(const SmoothMap& map, const std::vector<Expression>& components);

/// Target-metric norm of a vector at phi(x).
double target_norm(const SmoothMap& map, std::span<const double> x, std::span<const double> v);

} // namespace pbh
