#include "pbh/mapcalc/smooth_map.hpp"

#include <cmath>

namespace pbh {
namespace {

// |dphi| below this is treated as vanishing.
constexpr double kSingularNormSquared = 1e-24;

std::string point_string(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + std::to_string(x[i]);
    return s + ")";
}

std::size_t second_index(int n, int m, int a, int i, int j) {
    if (i > j) std::swap(i, j);
    const int pairs = m * (m + 1) / 2;
    const int pair = i * m - i * (i - 1) / 2 + (j - i);
    return static_cast<std::size_t>(n + n * m + a * pairs + pair);
}

} // namespace

SmoothMap::SmoothMap(ChartMetric source, ChartMetric target, std::vector<Expression> components, Parameters params)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)),
      params_(std::move(params)) {
    const int m = source_.dim();
    const int n = target_.dim();
    if (static_cast<int>(components_.size()) != n)
        throw ConfigError("map has " + std::to_string(components_.size()) + " components but target dimension is " +
                          std::to_string(n));
    for (const auto& c : components_)
        if (c.max_coordinate() >= m) throw ConfigError("map component references a coordinate beyond the source dimension");

    std::vector<Expression> all = components_;
    std::vector<std::vector<Expression>> first(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < m; ++i) {
            first[static_cast<std::size_t>(a)].push_back(components_[static_cast<std::size_t>(a)].derivative(i));
            all.push_back(first[static_cast<std::size_t>(a)].back());
        }
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                all.push_back(first[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)].derivative(j));
    tape_ = std::make_shared<Tape>(all);
}

SmoothMap SmoothMap::with_parameters(const Parameters& params) const {
    Parameters next = params_;
    for (const auto& name : next.names) next.set(name, params.get(name));
    return SmoothMap(source_.with_parameters(params), target_.with_parameters(params), components_, next);
}

std::vector<double> SmoothMap::operator()(std::span<const double> x) const {
    std::vector<double> phi;
    evaluate<double>(x, phi, nullptr, nullptr);
    return phi;
}

template <class T>
void SmoothMap::evaluate(std::span<const T> x, std::vector<T>& phi, Matrix<T>* dphi, std::vector<Matrix<T>>* ddphi) const {
    const int m = source_dim();
    const int n = target_dim();
    if (static_cast<int>(x.size()) != m) throw ConfigError("map evaluated at a point of the wrong dimension");
    std::vector<T> out(tape_->output_count());
    tape_->run(x, params_.values, out);
    phi.assign(out.begin(), out.begin() + n);
    if (dphi) {
        *dphi = Matrix<T>(n, m);
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < m; ++i) (*dphi)(a, i) = out[static_cast<std::size_t>(n + a * m + i)];
    }
    if (ddphi) {
        ddphi->assign(static_cast<std::size_t>(n), Matrix<T>(m, m));
        for (int a = 0; a < n; ++a)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) (*ddphi)[static_cast<std::size_t>(a)](i, j) = out[second_index(n, m, a, i, j)];
    }
}

template void SmoothMap::evaluate<double>(std::span<const double>, std::vector<double>&, Matrix<double>*,
                                          std::vector<Matrix<double>>*) const;
template void SmoothMap::evaluate<Jet>(std::span<const Jet>, std::vector<Jet>&, Matrix<Jet>*, std::vector<Matrix<Jet>>*) const;

MapJets local_jets(const SmoothMap& map, std::span<const double> x, int order) {
    MapJets jets;
    jets.m = map.source_dim();
    jets.n = map.target_dim();
    jets.order = order;
    jets.map = &map;
    jets.x.assign(x.begin(), x.end());
    const auto seeded = seed_point(x, order);
    map.evaluate<Jet>(seeded, jets.phi, &jets.dphi, &jets.ddphi);
    jets.source = metric_at<Jet>(map.source(), seeded);
    jets.target = metric_at<Jet>(map.target(), jets.phi);
    return jets;
}

Jet target_inner(const MapJets& jets, const std::vector<Jet>& u, const std::vector<Jet>& v) {
    return bilinear(jets.target.g, u, v);
}

std::vector<Jet> differential_column(const MapJets& jets, int i) {
    std::vector<Jet> col(static_cast<std::size_t>(jets.n));
    for (int a = 0; a < jets.n; ++a) col[static_cast<std::size_t>(a)] = jets.dphi(a, i);
    return col;
}

Jet energy_density_squared(const MapJets& jets) {
    Jet s = 0.0;
    for (int i = 0; i < jets.m; ++i)
        for (int j = 0; j < jets.m; ++j)
            s += jets.source.ginv(i, j) * target_inner(jets, differential_column(jets, i), differential_column(jets, j));
    return s;
}

std::vector<Matrix<Jet>> hessian_of_map(const MapJets& jets) {
    const int m = jets.m;
    const int n = jets.n;
    std::vector<Matrix<Jet>> hess(static_cast<std::size_t>(n), Matrix<Jet>(m, m));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                Jet s = jets.ddphi[static_cast<std::size_t>(a)](i, j);
                for (int k = 0; k < m; ++k) s -= jets.source.gamma(k, i, j) * jets.dphi(a, k);
                for (int mu = 0; mu < n; ++mu)
                    for (int nu = 0; nu < n; ++nu)
                        s += jets.target.gamma(a, mu, nu) * jets.dphi(mu, i) * jets.dphi(nu, j);
                hess[static_cast<std::size_t>(a)](i, j) = s;
                hess[static_cast<std::size_t>(a)](j, i) = s;
            }
    return hess;
}

std::vector<Jet> tension_jets(const MapJets& jets) {
    const auto hess = hessian_of_map(jets);
    std::vector<Jet> tau(static_cast<std::size_t>(jets.n), Jet(0.0));
    for (int a = 0; a < jets.n; ++a)
        for (int i = 0; i < jets.m; ++i)
            for (int j = 0; j < jets.m; ++j)
                tau[static_cast<std::size_t>(a)] += jets.source.ginv(i, j) * hess[static_cast<std::size_t>(a)](i, j);
    return tau;
}

void require_nonsingular(const MapJets& jets, const char* what) {
    const double q = energy_density_squared(jets).value();
    if (!(q > kSingularNormSquared))
        throw SingularityError(std::string(what) + ": |dphi| vanishes at " + point_string(jets.x));
}

std::vector<Jet> p_tension_jets(const MapJets& jets, double p) {
    if (jets.order < 1) throw ConfigError("p-tension needs jets of order >= 1");
    std::vector<Jet> tau = tension_jets(jets);
    if (p == 2.0) {
        for (auto& t : tau) t = t.truncated(jets.order - 1);
        return tau;
    }
    require_nonsingular(jets, "p-tension");
    const Jet q = energy_density_squared(jets);
    const Jet f = pow(q, (p - 2.0) / 2.0);
    const Jet coef = ((p - 2.0) / 2.0) * pow(q, (p - 4.0) / 2.0);
    std::vector<Jet> grad_q(static_cast<std::size_t>(jets.m), Jet(0.0));
    for (int i = 0; i < jets.m; ++i)
        for (int j = 0; j < jets.m; ++j) grad_q[static_cast<std::size_t>(i)] += jets.source.ginv(i, j) * q.partial(j);
    std::vector<Jet> out(static_cast<std::size_t>(jets.n));
    for (int a = 0; a < jets.n; ++a) {
        Jet dgrad = 0.0;
        for (int i = 0; i < jets.m; ++i) dgrad += jets.dphi(a, i) * grad_q[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(a)] = f * tau[static_cast<std::size_t>(a)] + coef * dgrad;
    }
    return out;
}

std::vector<Jet> covariant_derivative(const MapJets& jets, const std::vector<Jet>& v, int i) {
    std::vector<Jet> out(static_cast<std::size_t>(jets.n));
    for (int a = 0; a < jets.n; ++a) {
        Jet s = v[static_cast<std::size_t>(a)].partial(i);
        for (int mu = 0; mu < jets.n; ++mu)
            for (int nu = 0; nu < jets.n; ++nu)
                s += jets.target.gamma(a, mu, nu) * jets.dphi(mu, i) * v[static_cast<std::size_t>(nu)];
        out[static_cast<std::size_t>(a)] = s;
    }
    return out;
}

std::vector<Jet> trace_covariant_divergence(const MapJets& jets, const std::vector<std::vector<Jet>>& w) {
    std::vector<Jet> out(static_cast<std::size_t>(jets.n), Jet(0.0));
    for (int i = 0; i < jets.m; ++i) {
        for (int j = 0; j < jets.m; ++j) {
            const Jet& gij = jets.source.ginv(i, j);
            const auto dw = covariant_derivative(jets, w[static_cast<std::size_t>(j)], i);
            for (int a = 0; a < jets.n; ++a) {
                Jet s = dw[static_cast<std::size_t>(a)];
                for (int k = 0; k < jets.m; ++k)
                    s -= jets.source.gamma(k, i, j) * w[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)];
                out[static_cast<std::size_t>(a)] += gij * s;
            }
        }
    }
    return out;
}

Jet pairing_with_differential(const MapJets& jets, const std::vector<Jet>& v) {
    Jet s = 0.0;
    for (int i = 0; i < jets.m; ++i) {
        const auto dv = covariant_derivative(jets, v, i);
        for (int j = 0; j < jets.m; ++j) s += jets.source.ginv(i, j) * target_inner(jets, dv, differential_column(jets, j));
    }
    return s;
}

Matrix<double> dmap(const SmoothMap& map, std::span<const double> x) {
    std::vector<double> phi;
    Matrix<double> d;
    map.evaluate<double>(x, phi, &d, nullptr);
    Matrix<double> out(map.source_dim(), map.target_dim());
    for (int i = 0; i < map.source_dim(); ++i)
        for (int a = 0; a < map.target_dim(); ++a) out(i, a) = d(a, i);
    return out;
}

double dmap_norm(const SmoothMap& map, std::span<const double> x) {
    return std::sqrt(energy_density_squared(local_jets(map, x, 0)).value());
}

std::vector<Matrix<double>> second_fundamental_form_map(const SmoothMap& map, std::span<const double> x) {
    const auto hess = hessian_of_map(local_jets(map, x, 0));
    std::vector<Matrix<double>> out;
    for (const auto& h : hess) {
        Matrix<double> v(h.rows(), h.cols());
        for (int i = 0; i < h.rows(); ++i)
            for (int j = 0; j < h.cols(); ++j) v(i, j) = h(i, j).value();
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<double> tension(const SmoothMap& map, std::span<const double> x) {
    return values_of(tension_jets(local_jets(map, x, 0)));
}

std::vector<double> p_tension(const SmoothMap& map, std::span<const double> x, double p) {
    return values_of(p_tension_jets(local_jets(map, x, 1), p));
}

std::vector<double> p_tension_divergence_form(const SmoothMap& map, std::span<const double> x, double p) {
    const MapJets jets = local_jets(map, x, 1);
    Jet f = 1.0;
    if (p != 2.0) {
        require_nonsingular(jets, "p-tension");
        f = pow(energy_density_squared(jets), (p - 2.0) / 2.0);
    }
    std::vector<std::vector<Jet>> w;
    for (int j = 0; j < jets.m; ++j) {
        auto col = differential_column(jets, j);
        for (auto& c : col) c = f * c;
        w.push_back(std::move(col));
    }
    return values_of(trace_covariant_divergence(jets, w));
}

std::vector<double> pullback_derivative(const FieldAlongMap& field, int direction, std::span<const double> x) {
    const auto v = field.rule(x, 1);
    const MapJets jets = local_jets(field.map, x, 0);
    if (static_cast<int>(v.size()) != jets.n) throw ConfigError("field along map has the wrong dimension");
    if (direction < 0 || direction >= jets.m) throw ConfigError("pullback_derivative: direction out of range");
    return values_of(covariant_derivative(jets, v, direction));
}

std::vector<double> p_bitension_jets(const MapJets& jets, double p) {
    if (jets.order < 3) throw ConfigError("p-bitension needs jets of order >= 3");
    const int m = jets.m;
    const int n = jets.n;
    const auto tp = p_tension_jets(jets, p);
    const Jet q = energy_density_squared(jets);
    const Jet f = p == 2.0 ? Jet(1.0) : pow(q, (p - 2.0) / 2.0);

    std::vector<std::vector<Jet>> dtp;
    for (int j = 0; j < m; ++j) dtp.push_back(covariant_derivative(jets, tp, j));

    // trace_g nabla^phi |dphi|^{p-2} nabla^phi tau_p
    std::vector<std::vector<Jet>> w = dtp;
    for (auto& col : w)
        for (auto& c : col) c = f * c;
    const auto rough = trace_covariant_divergence(jets, w);

    // trace_g nabla <nabla^phi tau_p, dphi> |dphi|^{p-4} dphi
    std::vector<double> third(static_cast<std::size_t>(n), 0.0);
    if (p != 2.0) {
        Jet inner = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                inner += jets.source.ginv(i, j) * target_inner(jets, dtp[static_cast<std::size_t>(i)], differential_column(jets, j));
        const Jet big_f = inner * pow(q, (p - 4.0) / 2.0);
        std::vector<std::vector<Jet>> wf;
        for (int j = 0; j < m; ++j) {
            auto col = differential_column(jets, j);
            for (auto& c : col) c = big_f * c;
            wf.push_back(std::move(col));
        }
        third = values_of(trace_covariant_divergence(jets, wf));
    }

    // trace_g R^N(tau_p, dphi) dphi at the base point
    const auto y = values_of(jets.phi);
    const Curvature r = curvature_tensor(jets.map->target(), y);
    std::vector<double> curv(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double gij = jets.source.ginv(i, j).value();
            if (gij == 0.0) continue;
            for (int l = 0; l < n; ++l)
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c)
                            curv[static_cast<std::size_t>(l)] += gij * r.up(l, a, b, c) * tp[static_cast<std::size_t>(a)].value() *
                                                                 jets.dphi(b, i).value() * jets.dphi(c, j).value();
        }

    std::vector<double> out(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a)
        out[static_cast<std::size_t>(a)] = -f.value() * curv[static_cast<std::size_t>(a)] - rough[static_cast<std::size_t>(a)].value() -
                                           (p - 2.0) * third[static_cast<std::size_t>(a)];
    return out;
}

std::vector<double> p_bitension(const SmoothMap& map, std::span<const double> x, double p) {
    return p_bitension_jets(local_jets(map, x, 3), p);
}

FieldAlongMap tension_field(const SmoothMap& map) {
    return {map, [map](std::span<const double> x, int order) { return tension_jets(local_jets(map, x, order)); }};
}

FieldAlongMap p_tension_field(const SmoothMap& map, double p) {
    return {map, [map, p](std::span<const double> x, int order) { return p_tension_jets(local_jets(map, x, order + 1), p); }};
}

FieldAlongMap differential_field(const SmoothMap& map, int direction) {
    if (direction < 0 || direction >= map.source_dim()) throw ConfigError("differential_field: direction out of range");
    return {map, [map, direction](std::span<const double> x, int order) {
                return differential_column(local_jets(map, x, order), direction);
            }};
}

FieldAlongMap expression_field(const SmoothMap& map, const std::vector<Expression>& components) {
    if (static_cast<int>(components.size()) != map.target_dim())
        throw ConfigError("expression_field: component count must equal the target dimension");
    return {map, vector_field(components, map.parameters())};
}

double target_norm(const SmoothMap& map, std::span<const double> x, std::span<const double> v) {
    const auto y = map(x);
    const Matrix<double> h = map.target().metric(y);
    const std::vector<double> vv(v.begin(), v.end());
    return std::sqrt(bilinear(h, vv, vv));
}

} // namespace pbh
