#include "pbh/geometry/chart.hpp"

#include <cmath>

namespace pbh {

int Parameters::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

double Parameters::get(const std::string& name) const {
    const int i = index_of(name);
    if (i < 0 || i >= static_cast<int>(values.size())) throw ConfigError("parameter '" + name + "' is not bound");
    return values[static_cast<std::size_t>(i)];
}

void Parameters::set(const std::string& name, double value) {
    const int i = index_of(name);
    if (i >= 0) {
        if (values.size() < names.size()) values.resize(names.size(), 0.0);
        values[static_cast<std::size_t>(i)] = value;
        return;
    }
    names.push_back(name);
    values.resize(names.size() - 1, 0.0);
    values.push_back(value);
}

bool Box::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lower[i] || x[i] > upper[i]) return false;
    return true;
}

std::vector<Jet> seed_point(std::span<const double> x, int order) {
    const int n = static_cast<int>(x.size());
    std::vector<Jet> out;
    out.reserve(x.size());
    for (int i = 0; i < n; ++i) out.push_back(Jet::variable(x[static_cast<std::size_t>(i)], i, n, order));
    return out;
}

ChartMetric::ChartMetric(int dim, std::vector<std::vector<Expression>> components, Parameters params,
                         std::optional<Box> domain)
    : dim_(dim), params_(std::move(params)), domain_(std::move(domain)) {
    if (dim < 1) throw ConfigError("chart dimension must be at least 1");
    if (static_cast<int>(components.size()) != dim) throw ConfigError("metric must have dim rows");
    for (const auto& row : components)
        if (static_cast<int>(row.size()) != dim) throw ConfigError("metric must have dim columns");
    if (domain_ && domain_->dim() != dim) throw ConfigError("domain box dimension mismatch");

    components_.resize(static_cast<std::size_t>(dim * dim));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const auto& a = components[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const auto& b = components[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (a.max_coordinate() >= dim) throw ConfigError("metric component references a coordinate beyond dim");
            const bool same = a.root() == b.root() ||
                              (a.is_constant() && b.is_constant() && a.node().value == b.node().value);
            components_[static_cast<std::size_t>(i * dim + j)] = same ? a : 0.5 * (a + b);
        }
    }

    std::vector<Expression> values;
    std::vector<Expression> all;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) values.push_back(component(i, j));
    all = values;
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) all.push_back(component(i, j).derivative(k));
    values_tape_ = std::make_shared<Tape>(values);
    full_tape_ = std::make_shared<Tape>(all);
}

ChartMetric ChartMetric::euclidean(int dim) {
    std::vector<std::vector<Expression>> g(static_cast<std::size_t>(dim),
                                           std::vector<Expression>(static_cast<std::size_t>(dim)));
    for (int i = 0; i < dim; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Expression::constant(1.0);
    ChartMetric chart(dim, std::move(g));
    chart.tag_space_form(0.0);
    return chart;
}

ChartMetric ChartMetric::conformal(int dim, const Expression& factor, Parameters params) {
    std::vector<std::vector<Expression>> g(static_cast<std::size_t>(dim),
                                           std::vector<Expression>(static_cast<std::size_t>(dim)));
    for (int i = 0; i < dim; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = factor;
    return ChartMetric(dim, std::move(g), std::move(params));
}

ChartMetric& ChartMetric::tag_space_form(double c) {
    space_form_ = c;
    return *this;
}

ChartMetric ChartMetric::with_parameters(const Parameters& params) const {
    ChartMetric copy = *this;
    for (const auto& name : params_.names)
        if (params.index_of(name) < 0) throw ConfigError("with_parameters: missing parameter '" + name + "'");
    Parameters next = params_;
    for (std::size_t i = 0; i < next.names.size(); ++i) next.set(next.names[i], params.get(next.names[i]));
    copy.params_ = std::move(next);
    return copy;
}

Matrix<double> ChartMetric::metric(std::span<const double> x) const {
    Matrix<double> g;
    evaluate<double>(x, g, nullptr);
    return g;
}

template <class T>
void ChartMetric::evaluate(std::span<const T> x, Matrix<T>& g, std::vector<Matrix<T>>* dg) const {
    if (static_cast<int>(x.size()) != dim_) throw ConfigError("metric evaluated at a point of the wrong dimension");
    const int n2 = dim_ * dim_;
    std::vector<T> out(dg ? full_tape_->output_count() : values_tape_->output_count());
    (dg ? full_tape_ : values_tape_)->run(x, params_.values, out);
    g = Matrix<T>(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) g(i, j) = out[static_cast<std::size_t>(i * dim_ + j)];
    if (dg) {
        dg->assign(static_cast<std::size_t>(dim_), Matrix<T>(dim_, dim_));
        for (int k = 0; k < dim_; ++k)
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j)
                    (*dg)[static_cast<std::size_t>(k)](i, j) = out[static_cast<std::size_t>(n2 + (k * dim_ + i) * dim_ + j)];
    }
}

template void ChartMetric::evaluate<double>(std::span<const double>, Matrix<double>&, std::vector<Matrix<double>>*) const;
template void ChartMetric::evaluate<Jet>(std::span<const Jet>, Matrix<Jet>&, std::vector<Matrix<Jet>>*) const;

ChartMetric space_form_chart(double c, int dim) {
    Expression r2 = Expression::constant(0.0);
    for (int i = 0; i < dim; ++i) r2 = r2 + Expression::coordinate(i) * Expression::coordinate(i);
    const Expression factor = pow(1.0 + (c / 4.0) * r2, -2.0);
    ChartMetric chart = c == 0.0 ? ChartMetric::euclidean(dim) : ChartMetric::conformal(dim, factor);
    chart.tag_space_form(c);
    return chart;
}

Christoffel<double> christoffel(const ChartMetric& chart, std::span<const double> x) {
    return metric_at<double>(chart, x).gamma;
}

Curvature curvature_tensor(const ChartMetric& chart, std::span<const double> x) {
    const int d = chart.dim();
    const auto seeded = seed_point(x, 1);
    const auto m = metric_at<Jet>(chart, seeded);
    Curvature r;
    r.dim = d;
    r.upper.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
    r.lower.assign(r.upper.size(), 0.0);
    auto gam = [&](int k, int i, int j) { return m.gamma(k, i, j).value(); };
    auto dgam = [&](int a, int k, int i, int j) { return m.gamma(k, i, j).partial(a).value(); };
    for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double s = dgam(i, l, j, k) - dgam(j, l, i, k);
                    for (int e = 0; e < d; ++e) s += gam(l, i, e) * gam(e, j, k) - gam(l, j, e) * gam(e, i, k);
                    r.upper[static_cast<std::size_t>(((l * d + i) * d + j) * d + k)] = s;
                }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double s = 0.0;
                    for (int e = 0; e < d; ++e) s += m.g(l, e).value() * r.up(e, i, j, k);
                    r.lower[static_cast<std::size_t>(((i * d + j) * d + k) * d + l)] = s;
                }
    return r;
}

double sectional_curvature(const ChartMetric& chart, std::span<const double> x, std::span<const double> u,
                           std::span<const double> v) {
    const int d = chart.dim();
    const Curvature r = curvature_tensor(chart, x);
    const Matrix<double> g = chart.metric(x);
    double num = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    num += r.low(i, j, k, l) * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] *
                           v[static_cast<std::size_t>(k)] * u[static_cast<std::size_t>(l)];
    const std::vector<double> uu(u.begin(), u.end());
    const std::vector<double> vv(v.begin(), v.end());
    const double guv = bilinear(g, uu, vv);
    const double den = bilinear(g, uu, uu) * bilinear(g, vv, vv) - guv * guv;
    if (den <= 0.0) throw DegenerateError("sectional curvature of a degenerate 2-plane");
    return num / den;
}

double scalar_curvature(const ChartMetric& chart, std::span<const double> x) {
    const int d = chart.dim();
    const Curvature r = curvature_tensor(chart, x);
    const Matrix<double> ginv = inverse_spd(chart.metric(x));
    double s = 0.0;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            double ric = 0.0;
            for (int i = 0; i < d; ++i) ric += r.up(i, i, j, k);
            s += ginv(j, k) * ric;
        }
    return s;
}

Frame orthonormal_frame(const ChartMetric& chart, std::span<const double> x) {
    const int d = chart.dim();
    const Matrix<double> g = chart.metric(x);
    Frame frame;
    frame.base_point.assign(x.begin(), x.end());
    for (int i = 0; i < d; ++i) {
        std::vector<double> v(static_cast<std::size_t>(d), 0.0);
        v[static_cast<std::size_t>(i)] = 1.0;
        for (const auto& e : frame.vectors) {
            const double proj = bilinear(g, v, e);
            for (int k = 0; k < d; ++k) v[static_cast<std::size_t>(k)] -= proj * e[static_cast<std::size_t>(k)];
        }
        const double norm2 = bilinear(g, v, v);
        if (!(norm2 > 0.0)) throw DegenerateError("Gram-Schmidt breakdown: metric is not positive definite");
        const double norm = std::sqrt(norm2);
        for (auto& c : v) c /= norm;
        frame.vectors.push_back(std::move(v));
    }
    // Re-orthogonalize once; the first pass loses accuracy for badly scaled metrics.
    for (int i = 0; i < d; ++i) {
        auto& v = frame.vectors[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) {
            const auto& e = frame.vectors[static_cast<std::size_t>(j)];
            const double proj = bilinear(g, v, e);
            for (int k = 0; k < d; ++k) v[static_cast<std::size_t>(k)] -= proj * e[static_cast<std::size_t>(k)];
        }
        const double norm = std::sqrt(bilinear(g, v, v));
        for (auto& c : v) c /= norm;
    }
    return frame;
}

ScalarField scalar_field(const Expression& f, const Parameters& params) {
    return [f, values = params.values](std::span<const double> x, int order) {
        const auto seeded = seed_point(x, order);
        return f.evaluate(std::span<const Jet>(seeded), values);
    };
}

VectorField vector_field(const std::vector<Expression>& components, const Parameters& params) {
    auto tape = std::make_shared<Tape>(components);
    return [tape, values = params.values](std::span<const double> x, int order) {
        const auto seeded = seed_point(x, order);
        std::vector<Jet> out(tape->output_count());
        tape->run(seeded, values, out);
        return out;
    };
}

std::vector<double> gradient(const ChartMetric& chart, const ScalarField& f, std::span<const double> x) {
    const int d = chart.dim();
    const Jet fx = f(x, 1);
    const Matrix<double> ginv = inverse_spd(chart.metric(x));
    std::vector<double> grad(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) grad[static_cast<std::size_t>(i)] += ginv(i, j) * fx.partial(j).value();
    return grad;
}

double divergence(const ChartMetric& chart, const VectorField& field, std::span<const double> x) {
    const int d = chart.dim();
    const auto v = field(x, 1);
    if (static_cast<int>(v.size()) != d) throw ConfigError("divergence: vector field has the wrong dimension");
    const auto gamma = christoffel(chart, x);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        s += v[static_cast<std::size_t>(i)].partial(i).value();
        for (int k = 0; k < d; ++k) s += gamma(i, i, k) * v[static_cast<std::size_t>(k)].value();
    }
    return s;
}

std::vector<double> divergence_2tensor(const ChartMetric& chart, const TensorField& field, std::span<const double> x) {
    const int d = chart.dim();
    const Matrix<Jet> t = field(x, 1);
    if (t.rows() != d || t.cols() != d) throw ConfigError("divergence_2tensor: tensor field has the wrong shape");
    const auto m = metric_at<double>(chart, x);
    std::vector<double> out(static_cast<std::size_t>(d), 0.0);
    for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double cov = t(j, k).partial(i).value();
                for (int l = 0; l < d; ++l)
                    cov -= m.gamma(l, i, j) * t(l, k).value() + m.gamma(l, i, k) * t(j, l).value();
                s += m.ginv(i, j) * cov;
            }
        out[static_cast<std::size_t>(k)] = s;
    }
    return out;
}

} // namespace pbh
