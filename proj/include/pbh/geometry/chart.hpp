#pragma once

#include "pbh/expr/expression.hpp"
#include "pbh/geometry/linalg.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pbh {

/// Named parameter table shared by every expression of one scenario.
struct Parameters {
    std::vector<std::string> names;
    std::vector<double> values;

    int index_of(const std::string& name) const;
    double get(const std::string& name) const;
    /// Sets an existing parameter or appends a new one.
    void set(const std::string& name, double value);
};

/// Axis-aligned box [lower_i, upper_i].
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    int dim() const noexcept { return static_cast<int>(lower.size()); }
    bool contains(std::span<const double> x) const;
};

/// Seeded coordinate jets x_i + dx_i, for i < x.size().
std::vector<Jet> seed_point(std::span<const double> x, int order);

/**
 * A single coordinate chart with metric components g_ij given as expressions.
 *
 * The component matrix is symmetrized on construction. First partial derivatives of all
 * components are derived symbolically once and compiled together with the components into
 * one tape, so metric evaluation at a jet point yields g and dg at the jet's full order.
 */
class ChartMetric {
public:
    ChartMetric(int dim, std::vector<std::vector<Expression>> components, Parameters params = {},
                std::optional<Box> domain = std::nullopt);

    static ChartMetric euclidean(int dim);
    /// g = factor * delta.
    static ChartMetric conformal(int dim, const Expression& factor, Parameters params = {});

    int dim() const noexcept { return dim_; }
    const Expression& component(int i, int j) const { return components_[static_cast<std::size_t>(i * dim_ + j)]; }
    const Parameters& parameters() const noexcept { return params_; }
    const std::optional<Box>& domain() const noexcept { return domain_; }

    std::optional<double> space_form_curvature() const noexcept { return space_form_; }
    ChartMetric& tag_space_form(double c);

    /// Same chart with different parameter values (names must match).
    ChartMetric with_parameters(const Parameters& params) const;

    Matrix<double> metric(std::span<const double> x) const;

    /// g_ij at x; when `dg` is non-null, dg[k](i, j) = d_k g_ij.
    template <class T>
    void evaluate(std::span<const T> x, Matrix<T>& g, std::vector<Matrix<T>>* dg) const;

private:
    int dim_;
    std::vector<Expression> components_;
    Parameters params_;
    std::optional<Box> domain_;
    std::optional<double> space_form_;
    std::shared_ptr<const Tape> values_tape_;
    std::shared_ptr<const Tape> full_tape_;
};

/// Metric with conformal factor (1 + (c/4)|x|^2)^(-2), tagged as space form of curvature c.
ChartMetric space_form_chart(double c, int dim);

/// Gamma^k_ij stored as data[(k * dim + i) * dim + j].
template <class T>
struct Christoffel {
    int dim = 0;
    std::vector<T> data;

    Christoffel() = default;
    explicit Christoffel(int d) : dim(d), data(static_cast<std::size_t>(d * d * d), T(0.0)) {}
    T& operator()(int k, int i, int j) { return data[static_cast<std::size_t>((k * dim + i) * dim + j)]; }
    const T& operator()(int k, int i, int j) const { return data[static_cast<std::size_t>((k * dim + i) * dim + j)]; }
};

/// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
template <class T>
Christoffel<T> christoffel_from(const Matrix<T>& ginv, const std::vector<Matrix<T>>& dg) {
    const int d = ginv.rows();
    Christoffel<T> gamma(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            for (int k = 0; k < d; ++k) {
                T s = T(0.0);
                for (int l = 0; l < d; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                s = s * 0.5;
                gamma(k, i, j) = s;
                gamma(k, j, i) = s;
            }
        }
    }
    return gamma;
}

/// Metric, inverse metric, and Christoffel symbols at one (possibly jet) point.
template <class T>
struct MetricAt {
    Matrix<T> g;
    Matrix<T> ginv;
    std::vector<Matrix<T>> dg;
    Christoffel<T> gamma;
};

template <class T>
MetricAt<T> metric_at(const ChartMetric& chart, std::span<const T> x) {
    MetricAt<T> m;
    chart.evaluate<T>(x, m.g, &m.dg);
    m.ginv = inverse_spd(m.g);
    m.gamma = christoffel_from(m.ginv, m.dg);
    return m;
}

Christoffel<double> christoffel(const ChartMetric& chart, std::span<const double> x);

/// R(d_i, d_j) d_k = R^l_ijk d_l and its lowering R_ijkl = g_lm R^m_ijk... stored as
/// upper[((l * d + i) * d + j) * d + k] and lower[((i * d + j) * d + k) * d + l] = g(R(d_i, d_j) d_k, d_l).
struct Curvature {
    int dim = 0;
    std::vector<double> upper;
    std::vector<double> lower;

    double up(int l, int i, int j, int k) const { return upper[static_cast<std::size_t>(((l * dim + i) * dim + j) * dim + k)]; }
    double low(int i, int j, int k, int l) const { return lower[static_cast<std::size_t>(((i * dim + j) * dim + k) * dim + l)]; }
};

Curvature curvature_tensor(const ChartMetric& chart, std::span<const double> x);

/// K(u, v) = g(R(u, v) v, u) / (g(u,u) g(v,v) - g(u,v)^2).
double sectional_curvature(const ChartMetric& chart, std::span<const double> x, std::span<const double> u,
                           std::span<const double> v);
double scalar_curvature(const ChartMetric& chart, std::span<const double> x);

/// g-orthonormal basis from Gram-Schmidt of the coordinate basis in index order.
struct Frame {
    std::vector<double> base_point;
    std::vector<std::vector<double>> vectors;
};

Frame orthonormal_frame(const ChartMetric& chart, std::span<const double> x);

/// Fields return jets in dim() seed variables of at least the requested order at x.
using ScalarField = std::function<Jet(std::span<const double> x, int order)>;
using VectorField = std::function<std::vector<Jet>(std::span<const double> x, int order)>;
using TensorField = std::function<Matrix<Jet>(std::span<const double> x, int order)>;

ScalarField scalar_field(const Expression& f, const Parameters& params);
VectorField vector_field(const std::vector<Expression>& components, const Parameters& params);

/// grad f = g^{ij} d_j f d_i.
std::vector<double> gradient(const ChartMetric& chart, const ScalarField& f, std::span<const double> x);
/// div X = d_i X^i + Gamma^i_ik X^k.
double divergence(const ChartMetric& chart, const VectorField& field, std::span<const double> x);
/// (div T)_k = g^{ij} (nabla_i T)_jk for a symmetric (0,2)-tensor field.
std::vector<double> divergence_2tensor(const ChartMetric& chart, const TensorField& field, std::span<const double> x);

} // namespace pbh
