#pragma once

#include "pbh/mapcalc/smooth_map.hpp"

#include <optional>
#include <span>
#include <vector>

namespace pbh {

/**
 * An immersion of an m-dimensional parameter domain into a target chart. The source
 * metric is the pull-back g_ij = h_ab(phi) d_i phi^a d_j phi^b, built symbolically, so
 * the parametrization is an isometric immersion by construction.
 *
 * All expressions (components and target metric) share one parameter table.
 */
class Immersion {
public:
    Immersion(ChartMetric target, std::vector<Expression> components, int source_dim, Parameters params = {},
              std::optional<Box> domain = std::nullopt);

    const SmoothMap& map() const noexcept { return map_; }
    const ChartMetric& induced_metric() const noexcept { return map_.source(); }
    int dim() const noexcept { return map_.source_dim(); }
    int ambient_dim() const noexcept { return map_.target_dim(); }
    int codim() const noexcept { return ambient_dim() - dim(); }

    /// Curvature c of the space-form target; throws ConfigError when the target is untagged.
    double ambient_curvature() const;

    Immersion with_parameters(const Parameters& params) const;

    /// Throws DegenerateError unless dphi has rank m at x.
    void check_rank(std::span<const double> x) const;

    /// max |g_ij - user_ij| at x for a user-supplied source metric.
    double isometry_defect(const ChartMetric& user_source, std::span<const double> x) const;

private:
    explicit Immersion(SmoothMap map) : map_(std::move(map)) {}
    SmoothMap map_;
};

/// h-orthonormal basis of the normal space at phi(x).
struct NormalFrame {
    std::vector<double> base_point;
    std::vector<std::vector<double>> vectors;
};

/// Gram-Schmidt of the tangent columns, then of the ambient coordinate basis picked greedily
/// by largest remaining residual (ties to the lowest index); the normal outputs are kept.
NormalFrame normal_frame(const Immersion& imm, std::span<const double> x);

struct SecondFundamentalForm {
    NormalFrame frame;
    /// coefficients[a](i, j) = h(B(d_i, d_j), xi_a).
    std::vector<Matrix<double>> coefficients;
    /// vectors[alpha](i, j) = ambient component alpha of B(d_i, d_j).
    std::vector<Matrix<double>> vectors;
};

SecondFundamentalForm second_fundamental_form(const Immersion& imm, std::span<const double> x);

/// A_xi as a (1,1) tensor: A_xi d_i = sum_k A(k, i) d_k, with g(A_xi d_i, d_j) = h(B_ij, xi).
Matrix<double> shape_operator(const Immersion& imm, std::span<const double> x, std::span<const double> xi);

/// H = (1/m) trace_g B, ambient components.
std::vector<double> mean_curvature(const Immersion& imm, std::span<const double> x);
double mean_curvature_norm(const Immersion& imm, std::span<const double> x);

/// Orthogonal projection of an ambient vector onto the normal space at phi(x).
std::vector<double> normal_projection(const Immersion& imm, std::span<const double> x, std::span<const double> v);

/// nabla-perp_{d_i} xi for a field along the immersion.
std::vector<double> normal_connection(const Immersion& imm, std::span<const double> x, int direction,
                                      const FieldAlongMap& xi);
/// nabla-perp_{d_i} H.
std::vector<double> normal_derivative_H(const Immersion& imm, std::span<const double> x, int direction);
/// Rough normal Laplacian g^{ij}(nabla-perp_i nabla-perp_j H - Gamma^k_ij nabla-perp_k H).
std::vector<double> normal_laplacian_H(const Immersion& imm, std::span<const double> x);

/// Both left-hand sides of the characterization of p-biharmonic submanifolds of N(c).
struct Theorem21Residuals {
    std::vector<double> normal;  // ambient components
    std::vector<double> tangent; // source components
    double normal_norm = 0.0;    // h-norm
    double tangent_norm = 0.0;   // g-norm
};

Theorem21Residuals theorem21_residuals(const Immersion& imm, std::span<const double> x, double p);

/// Hypersurface form, with eta = H/|H| and A = A_eta.
struct Theorem23Residuals {
    double normal = 0.0;         // h(normal residual vector, eta)
    std::vector<double> normal_vector;
    std::vector<double> tangent; // source components
    double tangent_norm = 0.0;
};

Theorem23Residuals theorem23_residuals(const Immersion& imm, std::span<const double> x, double p);

/// |A|^2 = trace(A_eta^2) for a hypersurface with eta = H/|H|.
double shape_operator_norm_squared(const Immersion& imm, std::span<const double> x);

struct ProperP {
    double p_star = 0.0;
    bool admissible = false; // p_star >= 2
};

/// p* = 2 + (mc - |A|^2) / (m |H|^2) from the constant-mean-curvature condition.
ProperP cmc_proper_p(const Immersion& imm, std::span<const double> x);

/// Sample standard deviation of |H| below `threshold`.
bool has_constant_mean_curvature(const Immersion& imm, std::span<const std::vector<double>> points,
                                 double threshold = 1e-8);

/// Target-side inner product h(u, v) at phi(x).
double ambient_inner(const Immersion& imm, std::span<const double> x, std::span<const double> u,
                     std::span<const double> v);

} // namespace pbh
