#include "pbh/stress/stress.hpp"

#include <algorithm>
#include <cmath>

namespace pbh {
namespace {

using JetVec = std::vector<Jet>;

struct StressParts {
    Matrix<Jet> s;
    Jet tau_p_squared;
    Jet inner;
    Jet weight;
};

StressParts stress_parts(const MapJets& jets, double p) {
    if (jets.order < 2) throw ConfigError("stress tensor needs map jets of order >= 2");
    const int m = jets.m;
    if (p != 2.0) require_nonsingular(jets, "stress tensor");
    const JetVec tp = p_tension_jets(jets, p);
    const Jet q = energy_density_squared(jets);
    const Jet f = p == 2.0 ? Jet(1.0) : pow(q, 0.5 * (p - 2.0));

    std::vector<JetVec> cols;
    std::vector<JetVec> dtp;
    for (int i = 0; i < m; ++i) {
        cols.push_back(differential_column(jets, i));
        dtp.push_back(covariant_derivative(jets, tp, i));
    }
    Jet inner = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) inner += jets.source.ginv(i, j) * target_inner(jets, dtp[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    const Jet t2 = target_inner(jets, tp, tp);
    const Jet iso = -0.5 * t2 - f * inner;
    Jet aniso = 0.0;
    if (p != 2.0) aniso = (p - 2.0) * pow(q, 0.5 * (p - 4.0)) * inner;

    StressParts out{Matrix<Jet>(m, m), t2, inner, f};
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const auto& ci = cols[static_cast<std::size_t>(i)];
            const auto& cj = cols[static_cast<std::size_t>(j)];
            Jet s = iso * jets.source.g(i, j) + f * (target_inner(jets, ci, dtp[static_cast<std::size_t>(j)]) +
                                                    target_inner(jets, cj, dtp[static_cast<std::size_t>(i)]));
            if (p != 2.0) s += aniso * target_inner(jets, ci, cj);
            out.s(i, j) = s;
            out.s(j, i) = s;
        }
    return out;
}

/// theta^sharp as jets of order K-1.
JetVec theta_sharp_jets(const MapJets& jets, double p) {
    const int m = jets.m;
    if (p != 2.0) require_nonsingular(jets, "theta");
    const JetVec tp = p_tension_jets(jets, p);
    const Jet f = p == 2.0 ? Jet(1.0) : pow(energy_density_squared(jets), 0.5 * (p - 2.0));
    JetVec low;
    for (int i = 0; i < m; ++i) low.push_back(f * target_inner(jets, differential_column(jets, i), tp));
    JetVec up(static_cast<std::size_t>(m), Jet(0.0));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) up[static_cast<std::size_t>(k)] += jets.source.ginv(k, i) * low[static_cast<std::size_t>(i)];
    return up;
}

Matrix<double> values_of(const Matrix<Jet>& a) {
    Matrix<double> out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j).value();
    return out;
}

} // namespace

Matrix<Jet> stress_tensor_jets(const MapJets& jets, double p) { return stress_parts(jets, p).s; }

StressTensorValue stress_tensor(const SmoothMap& map, std::span<const double> x, double p) {
    const StressParts parts = stress_parts(local_jets(map, x, 2), p);
    StressTensorValue v;
    v.base_point.assign(x.begin(), x.end());
    v.p = p;
    v.s = values_of(parts.s);
    v.tau_p_squared = parts.tau_p_squared.value();
    v.inner = parts.inner.value();
    v.weight = parts.weight.value();
    return v;
}

double stress_trace(const SmoothMap& map, std::span<const double> x, double p) {
    const StressTensorValue v = stress_tensor(map, x, p);
    const Matrix<double> ginv = inverse_spd(map.source().metric(x));
    double t = 0.0;
    for (int i = 0; i < v.s.rows(); ++i)
        for (int j = 0; j < v.s.cols(); ++j) t += ginv(i, j) * v.s(i, j);
    return t;
}

StressTrace stress_trace_forms(const SmoothMap& map, std::span<const double> x, double p) {
    const StressTensorValue v = stress_tensor(map, x, p);
    const double m = map.source_dim();
    StressTrace t;
    t.direct = stress_trace(map, x, p);
    t.tau_p_squared = v.tau_p_squared;
    t.div_theta = theta_divergence(map, x, p);
    t.inner_form = -0.5 * m * v.tau_p_squared + (p - m) * v.weight * v.inner;
    t.theta_form = (0.5 * m - p) * v.tau_p_squared + (p - m) * t.div_theta;
    return t;
}

ThetaForm theta(const SmoothMap& map, std::span<const double> x, double p) {
    const MapJets jets = local_jets(map, x, 1);
    if (p != 2.0) require_nonsingular(jets, "theta");
    const auto tp = values_of(p_tension_jets(jets, p));
    const double f = p == 2.0 ? 1.0 : std::pow(energy_density_squared(jets).value(), 0.5 * (p - 2.0));
    const Matrix<double> h = map.target().metric(values_of(jets.phi));
    ThetaForm out{std::vector<double>(x.begin(), x.end()), {}};
    for (int i = 0; i < jets.m; ++i) out.components.push_back(f * bilinear(h, values_of(differential_column(jets, i)), tp));
    return out;
}

double theta_divergence(const SmoothMap& map, std::span<const double> x, double p) {
    const VectorField field = [&map, p](std::span<const double> y, int order) {
        return theta_sharp_jets(local_jets(map, y, order + 1), p);
    };
    return divergence(map.source(), field, x);
}

StressDivergence stress_divergence_check(const SmoothMap& map, std::span<const double> x, double p) {
    const TensorField field = [&map, p](std::span<const double> y, int order) {
        return stress_tensor_jets(local_jets(map, y, order + 2), p);
    };
    StressDivergence out;
    out.div_s = divergence_2tensor(map.source(), field, x);

    const MapJets jets = local_jets(map, x, 3);
    const auto t2 = p_bitension_jets(jets, p);
    const Matrix<double> h = map.target().metric(values_of(jets.phi));
    for (int k = 0; k < jets.m; ++k) out.rhs.push_back(-bilinear(h, t2, values_of(differential_column(jets, k))));
    for (std::size_t k = 0; k < out.rhs.size(); ++k) {
        out.gap = std::max(out.gap, std::fabs(out.div_s[k] - out.rhs[k]));
        out.scale = std::max({out.scale, std::fabs(out.div_s[k]), std::fabs(out.rhs[k])});
    }
    return out;
}

Matrix<double> classical_stress_bienergy(const SmoothMap& map, std::span<const double> x) {
    const int m = map.source_dim();
    const FieldAlongMap tau = tension_field(map);
    const auto t = tension(map, x);
    const Matrix<double> d = dmap(map, x);
    const Matrix<double> g = map.source().metric(x);
    const Matrix<double> ginv = inverse_spd(g);
    const Matrix<double> h = map.target().metric(map(x));

    std::vector<std::vector<double>> cols(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> dtau(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        for (int a = 0; a < map.target_dim(); ++a) cols[static_cast<std::size_t>(i)].push_back(d(i, a));
        dtau[static_cast<std::size_t>(i)] = pullback_derivative(tau, i, x);
    }
    double inner = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) inner += ginv(i, j) * bilinear(h, cols[static_cast<std::size_t>(j)], dtau[static_cast<std::size_t>(i)]);
    const double iso = -0.5 * bilinear(h, t, t) - inner;
    Matrix<double> s(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            s(i, j) = iso * g(i, j) + bilinear(h, cols[static_cast<std::size_t>(i)], dtau[static_cast<std::size_t>(j)]) +
                      bilinear(h, cols[static_cast<std::size_t>(j)], dtau[static_cast<std::size_t>(i)]);
    return s;
}

} // namespace pbh
