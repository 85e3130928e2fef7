#include "pbh/submanifold/immersion.hpp"

#include <cmath>
#include <numeric>

namespace pbh {
namespace {

// Residual norms below this count as vanishing in Gram-Schmidt and |H| tests.
constexpr double kRankTolerance = 1e-10;
constexpr double kZeroMeanCurvature = 1e-12;

using JetVec = std::vector<Jet>;

JetVec scaled(const JetVec& v, const Jet& s) {
    JetVec out = v;
    for (auto& c : out) c = c * s;
    return out;
}

void add_to(JetVec& acc, const JetVec& v, const Jet& s) {
    for (std::size_t a = 0; a < acc.size(); ++a) acc[a] += s * v[a];
}

/// Local extrinsic quantities as jets; B and H have the order of the map jets.
struct Extrinsic {
    MapJets jets;
    std::vector<JetVec> columns; // dphi(d_i)
    std::vector<JetVec> b;       // B(d_i, d_j) at i * m + j
    JetVec h;                    // mean curvature

    const JetVec& B(int i, int j) const { return b[static_cast<std::size_t>(i * jets.m + j)]; }

    JetVec normal_part(const JetVec& v) const {
        const int m = jets.m;
        JetVec out = v;
        std::vector<Jet> hv(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) hv[static_cast<std::size_t>(j)] = target_inner(jets, v, columns[static_cast<std::size_t>(j)]);
        for (int i = 0; i < m; ++i) {
            Jet coef = 0.0;
            for (int j = 0; j < m; ++j) coef += jets.source.ginv(i, j) * hv[static_cast<std::size_t>(j)];
            add_to(out, columns[static_cast<std::size_t>(i)], -coef);
        }
        return out;
    }

    /// (A_xi)^k_i = g^{kj} h(B_ij, xi).
    Matrix<Jet> shape(const JetVec& xi) const {
        const int m = jets.m;
        Matrix<Jet> low(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) low(i, j) = target_inner(jets, B(i, j), xi);
        Matrix<Jet> a(m, m);
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i) {
                Jet s = 0.0;
                for (int j = 0; j < m; ++j) s += jets.source.ginv(k, j) * low(i, j);
                a(k, i) = s;
            }
        return a;
    }

    JetVec normal_derivative(const JetVec& xi, int i) const { return normal_part(covariant_derivative(jets, xi, i)); }
};

Extrinsic extrinsic(const Immersion& imm, std::span<const double> x, int order) {
    Extrinsic e{local_jets(imm.map(), x, order), {}, {}, {}};
    const int m = e.jets.m;
    const int n = e.jets.n;
    for (int i = 0; i < m; ++i) e.columns.push_back(differential_column(e.jets, i));
    const auto hess = hessian_of_map(e.jets);
    e.b.resize(static_cast<std::size_t>(m * m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            JetVec v(static_cast<std::size_t>(n));
            for (int a = 0; a < n; ++a) v[static_cast<std::size_t>(a)] = hess[static_cast<std::size_t>(a)](i, j);
            e.b[static_cast<std::size_t>(i * m + j)] = e.normal_part(v);
        }
    e.h.assign(static_cast<std::size_t>(n), Jet(0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) add_to(e.h, e.B(i, j), e.jets.source.ginv(i, j) * (1.0 / m));
    return e;
}

/// Rough normal Laplacian of H from jets of order >= 2.
JetVec normal_laplacian(const Extrinsic& e, const std::vector<JetVec>& dh) {
    const int m = e.jets.m;
    JetVec out(static_cast<std::size_t>(e.jets.n), Jet(0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            JetVec term = e.normal_derivative(dh[static_cast<std::size_t>(j)], i);
            for (int k = 0; k < m; ++k) add_to(term, dh[static_cast<std::size_t>(k)], -e.jets.source.gamma(k, i, j));
            add_to(out, term, e.jets.source.ginv(i, j));
        }
    return out;
}

/// g^{kl} d_l f for a scalar jet of order >= 1.
JetVec source_gradient(const MapJets& jets, const Jet& f) {
    JetVec out(static_cast<std::size_t>(jets.m), Jet(0.0));
    for (int k = 0; k < jets.m; ++k)
        for (int l = 0; l < jets.m; ++l) out[static_cast<std::size_t>(k)] += jets.source.ginv(k, l) * f.partial(l);
    return out;
}

double source_norm(const MapJets& jets, const std::vector<double>& v) {
    Matrix<double> g(jets.m, jets.m);
    for (int i = 0; i < jets.m; ++i)
        for (int j = 0; j < jets.m; ++j) g(i, j) = jets.source.g(i, j).value();
    return std::sqrt(bilinear(g, v, v));
}

double target_norm_value(const MapJets& jets, const std::vector<double>& v) {
    Matrix<double> h(jets.n, jets.n);
    for (int i = 0; i < jets.n; ++i)
        for (int j = 0; j < jets.n; ++j) h(i, j) = jets.target.g(i, j).value();
    return std::sqrt(bilinear(h, v, v));
}

Matrix<double> values_of(const Matrix<Jet>& a) {
    Matrix<double> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).value();
    return out;
}

JetVec constant_jets(std::span<const double> v) {
    JetVec out;
    for (double c : v) out.emplace_back(c);
    return out;
}

Jet unit_normal_scale(const Extrinsic& e) {
    const Jet hh = target_inner(e.jets, e.h, e.h);
    if (!(std::sqrt(hh.value()) > kZeroMeanCurvature))
        throw DomainError("mean curvature vanishes at the base point; the hypersurface form needs |H| > 0");
    return sqrt(hh);
}

SmoothMap build_immersion_map(ChartMetric target, std::vector<Expression> components, int source_dim, Parameters params,
                              std::optional<Box> domain) {
    const int n = target.dim();
    if (static_cast<int>(components.size()) != n)
        throw ConfigError("immersion has " + std::to_string(components.size()) + " components but the ambient dimension is " +
                          std::to_string(n));
    if (source_dim < 1 || source_dim > n) throw ConfigError("immersion source dimension must lie in [1, ambient dimension]");

    std::vector<Expression> dphi;
    for (const auto& c : components)
        for (int i = 0; i < source_dim; ++i) dphi.push_back(c.derivative(i));
    std::vector<std::vector<Expression>> hsub(static_cast<std::size_t>(n), std::vector<Expression>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) hsub[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = target.component(a, b).substitute(components);

    std::vector<std::vector<Expression>> g(static_cast<std::size_t>(source_dim),
                                           std::vector<Expression>(static_cast<std::size_t>(source_dim)));
    for (int i = 0; i < source_dim; ++i)
        for (int j = i; j < source_dim; ++j) {
            Expression s = Expression::constant(0.0);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const auto& hab = hsub[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    if (hab.is_constant(0.0)) continue;
                    s = s + hab * dphi[static_cast<std::size_t>(a * source_dim + i)] * dphi[static_cast<std::size_t>(b * source_dim + j)];
                }
            g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
            g[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = s;
        }
    ChartMetric induced(source_dim, std::move(g), params, std::move(domain));
    return SmoothMap(std::move(induced), std::move(target), std::move(components), std::move(params));
}

} // namespace

Immersion::Immersion(ChartMetric target, std::vector<Expression> components, int source_dim, Parameters params,
                     std::optional<Box> domain)
    : map_(build_immersion_map(std::move(target), std::move(components), source_dim, std::move(params), std::move(domain))) {}

double Immersion::ambient_curvature() const {
    const auto c = map_.target().space_form_curvature();
    if (!c) throw ConfigError("immersion target is not a space form chart");
    return *c;
}

Immersion Immersion::with_parameters(const Parameters& params) const { return Immersion(map_.with_parameters(params)); }

void Immersion::check_rank(std::span<const double> x) const {
    const Matrix<double> g = induced_metric().metric(x);
    try {
        (void)cholesky(g);
    } catch (const DegenerateError&) {
        throw DegenerateError("immersion is not of full rank at the sample point");
    }
}

double Immersion::isometry_defect(const ChartMetric& user_source, std::span<const double> x) const {
    const Matrix<double> a = induced_metric().metric(x);
    const Matrix<double> b = user_source.metric(x);
    double d = 0.0;
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) d = std::max(d, std::fabs(a(i, j) - b(i, j)));
    return d;
}

NormalFrame normal_frame(const Immersion& imm, std::span<const double> x) {
    imm.check_rank(x);
    const int m = imm.dim();
    const int n = imm.ambient_dim();
    const auto y = imm.map()(x);
    const Matrix<double> h = imm.map().target().metric(y);
    const Matrix<double> d = dmap(imm.map(), x);

    std::vector<std::vector<double>> basis;
    auto residual = [&](std::vector<double> v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& e : basis) {
                const double c = bilinear(h, v, e);
                for (int a = 0; a < n; ++a) v[static_cast<std::size_t>(a)] -= c * e[static_cast<std::size_t>(a)];
            }
        return v;
    };
    auto push_normalized = [&](std::vector<double> v) {
        const double len = std::sqrt(bilinear(h, v, v));
        for (auto& c : v) c /= len;
        basis.push_back(std::move(v));
    };

    for (int i = 0; i < m; ++i) {
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a) col[static_cast<std::size_t>(a)] = d(i, a);
        push_normalized(residual(col));
    }
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    NormalFrame frame{std::vector<double>(x.begin(), x.end()), {}};
    for (int step = 0; step < n - m; ++step) {
        int best = -1;
        double best_len = 0.0;
        std::vector<double> best_vec;
        for (int a = 0; a < n; ++a) {
            if (used[static_cast<std::size_t>(a)]) continue;
            std::vector<double> e(static_cast<std::size_t>(n), 0.0);
            e[static_cast<std::size_t>(a)] = 1.0;
            auto r = residual(e);
            const double len = std::sqrt(bilinear(h, r, r));
            if (len > best_len + kRankTolerance) {
                best = a;
                best_len = len;
                best_vec = std::move(r);
            }
        }
        if (best < 0) throw DegenerateError("normal frame construction broke down");
        used[static_cast<std::size_t>(best)] = true;
        push_normalized(std::move(best_vec));
        frame.vectors.push_back(basis.back());
    }
    return frame;
}

SecondFundamentalForm second_fundamental_form(const Immersion& imm, std::span<const double> x) {
    SecondFundamentalForm out;
    out.frame = normal_frame(imm, x);
    const Extrinsic e = extrinsic(imm, x, 0);
    const int m = imm.dim();
    const int n = imm.ambient_dim();
    out.vectors.assign(static_cast<std::size_t>(n), Matrix<double>(m, m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int a = 0; a < n; ++a) out.vectors[static_cast<std::size_t>(a)](i, j) = e.B(i, j)[static_cast<std::size_t>(a)].value();
    for (const auto& xi : out.frame.vectors) {
        Matrix<double> c(m, m);
        const auto xij = constant_jets(xi);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) c(i, j) = target_inner(e.jets, e.B(i, j), xij).value();
        out.coefficients.push_back(std::move(c));
    }
    return out;
}

Matrix<double> shape_operator(const Immersion& imm, std::span<const double> x, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != imm.ambient_dim()) throw ConfigError("shape_operator: normal vector has the wrong dimension");
    const Extrinsic e = extrinsic(imm, x, 0);
    return values_of(e.shape(constant_jets(xi)));
}

std::vector<double> mean_curvature(const Immersion& imm, std::span<const double> x) {
    return values_of(extrinsic(imm, x, 0).h);
}

double mean_curvature_norm(const Immersion& imm, std::span<const double> x) {
    const Extrinsic e = extrinsic(imm, x, 0);
    return std::sqrt(target_inner(e.jets, e.h, e.h).value());
}

std::vector<double> normal_projection(const Immersion& imm, std::span<const double> x, std::span<const double> v) {
    const Extrinsic e = extrinsic(imm, x, 0);
    return values_of(e.normal_part(constant_jets(v)));
}

std::vector<double> normal_connection(const Immersion& imm, std::span<const double> x, int direction,
                                      const FieldAlongMap& xi) {
    if (direction < 0 || direction >= imm.dim()) throw ConfigError("normal_connection: direction out of range");
    const Extrinsic e = extrinsic(imm, x, 1);
    return values_of(e.normal_derivative(xi.rule(x, 1), direction));
}

std::vector<double> normal_derivative_H(const Immersion& imm, std::span<const double> x, int direction) {
    if (direction < 0 || direction >= imm.dim()) throw ConfigError("normal_derivative_H: direction out of range");
    const Extrinsic e = extrinsic(imm, x, 1);
    return values_of(e.normal_derivative(e.h, direction));
}

std::vector<double> normal_laplacian_H(const Immersion& imm, std::span<const double> x) {
    const Extrinsic e = extrinsic(imm, x, 2);
    std::vector<JetVec> dh;
    for (int j = 0; j < imm.dim(); ++j) dh.push_back(e.normal_derivative(e.h, j));
    return values_of(normal_laplacian(e, dh));
}

Theorem21Residuals theorem21_residuals(const Immersion& imm, std::span<const double> x, double p) {
    const double c = imm.ambient_curvature();
    const int m = imm.dim();
    const int n = imm.ambient_dim();
    const Extrinsic e = extrinsic(imm, x, 2);
    const auto& ginv = e.jets.source.ginv;

    std::vector<JetVec> dh;
    for (int j = 0; j < m; ++j) dh.push_back(e.normal_derivative(e.h, j));
    const JetVec lap = normal_laplacian(e, dh);

    // trace_g B(., A_H .) = g^{ij} (A_H)^k_j B_ik
    const Matrix<Jet> ah = e.shape(e.h);
    JetVec trace_b(static_cast<std::size_t>(n), Jet(0.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) add_to(trace_b, e.B(i, k), ginv(i, j) * ah(k, j));

    const Jet hh = target_inner(e.jets, e.h, e.h);
    const Jet coef = -m * (c - (p - 2.0) * hh);
    Theorem21Residuals r;
    r.normal.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        const auto au = static_cast<std::size_t>(a);
        r.normal[au] = (-lap[au] + trace_b[au] + coef * e.h[au]).value();
    }

    // 2 g^{ij} (A_{nabla-perp_i H})^k_j + (p - 2 + m/2) grad |H|^2
    const JetVec grad = source_gradient(e.jets, hh);
    r.tangent.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        const Matrix<Jet> a = e.shape(dh[static_cast<std::size_t>(i)]);
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) r.tangent[static_cast<std::size_t>(k)] += 2.0 * ginv(i, j).value() * a(k, j).value();
    }
    for (int k = 0; k < m; ++k) r.tangent[static_cast<std::size_t>(k)] += (p - 2.0 + 0.5 * m) * grad[static_cast<std::size_t>(k)].value();

    r.normal_norm = target_norm_value(e.jets, r.normal);
    r.tangent_norm = source_norm(e.jets, r.tangent);
    return r;
}

Theorem23Residuals theorem23_residuals(const Immersion& imm, std::span<const double> x, double p) {
    if (imm.codim() != 1) throw ConfigError("the hypersurface characterization needs codimension 1");
    const double c = imm.ambient_curvature();
    const int m = imm.dim();
    const int n = imm.ambient_dim();
    const Extrinsic e = extrinsic(imm, x, 2);

    const Jet norm_h = unit_normal_scale(e);
    const JetVec eta = scaled(e.h, 1.0 / norm_h);
    const Matrix<Jet> a = e.shape(eta);
    Jet a2 = 0.0;
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) a2 += a(i, k) * a(k, i);

    std::vector<JetVec> dh;
    for (int j = 0; j < m; ++j) dh.push_back(e.normal_derivative(e.h, j));
    const JetVec lap = normal_laplacian(e, dh);

    const Jet coef = a2 + m * (p - 2.0) * norm_h * norm_h - m * c;
    Theorem23Residuals r;
    r.normal_vector.resize(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        const auto bu = static_cast<std::size_t>(b);
        r.normal_vector[bu] = (-lap[bu] + coef * e.h[bu]).value();
    }
    r.normal = bilinear(values_of(e.jets.target.g), r.normal_vector, values_of(eta));

    // 2 A(grad |H|) + (2(p - 2) + m) |H| grad |H|
    const JetVec grad = source_gradient(e.jets, norm_h);
    r.tangent.assign(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < m; ++k) {
        double s = (2.0 * (p - 2.0) + m) * norm_h.value() * grad[static_cast<std::size_t>(k)].value();
        for (int i = 0; i < m; ++i) s += 2.0 * a(k, i).value() * grad[static_cast<std::size_t>(i)].value();
        r.tangent[static_cast<std::size_t>(k)] = s;
    }
    r.tangent_norm = source_norm(e.jets, r.tangent);
    return r;
}

double shape_operator_norm_squared(const Immersion& imm, std::span<const double> x) {
    if (imm.codim() != 1) throw ConfigError("|A|^2 of the unit normal needs codimension 1");
    const Extrinsic e = extrinsic(imm, x, 0);
    const Jet norm_h = unit_normal_scale(e);
    const Matrix<Jet> a = e.shape(scaled(e.h, 1.0 / norm_h));
    double s = 0.0;
    for (int i = 0; i < imm.dim(); ++i)
        for (int k = 0; k < imm.dim(); ++k) s += a(i, k).value() * a(k, i).value();
    return s;
}

ProperP cmc_proper_p(const Immersion& imm, std::span<const double> x) {
    const double c = imm.ambient_curvature();
    const int m = imm.dim();
    const double h = mean_curvature_norm(imm, x);
    if (!(h > kZeroMeanCurvature)) throw DomainError("cmc_proper_p: mean curvature vanishes, no finite p");
    const double a2 = shape_operator_norm_squared(imm, x);
    ProperP out;
    out.p_star = 2.0 + (m * c - a2) / (m * h * h);
    out.admissible = out.p_star >= 2.0;
    return out;
}

bool has_constant_mean_curvature(const Immersion& imm, std::span<const std::vector<double>> points, double threshold) {
    if (points.size() < 2) return true;
    std::vector<double> hs;
    for (const auto& x : points) hs.push_back(mean_curvature_norm(imm, x));
    const double mean = std::accumulate(hs.begin(), hs.end(), 0.0) / static_cast<double>(hs.size());
    double var = 0.0;
    for (double h : hs) var += (h - mean) * (h - mean);
    var /= static_cast<double>(hs.size() - 1);
    return std::sqrt(var) < threshold;
}

double ambient_inner(const Immersion& imm, std::span<const double> x, std::span<const double> u,
                     std::span<const double> v) {
    const Matrix<double> h = imm.map().target().metric(imm.map()(x));
    return bilinear(h, std::vector<double>(u.begin(), u.end()), std::vector<double>(v.begin(), v.end()));
}

} // namespace pbh
