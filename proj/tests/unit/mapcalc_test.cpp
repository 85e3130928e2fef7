#include "support.hpp"

#include "pbh/error.hpp"
#include "pbh/expr/parser.hpp"
#include "pbh/mapcalc/energy.hpp"
#include "pbh/mapcalc/smooth_map.hpp"
#include "pbh/scenarios/corpus.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <cmath>
#include <numbers>

using namespace pbh;
using pbh::test::mixed_gap;

namespace {

std::vector<Expression> exprs(const std::vector<std::string>& texts, int dim, const std::vector<std::string>& params = {}) {
    std::vector<Expression> out;
    for (const auto& t : texts) out.push_back(parse(t, dim, params));
    return out;
}

SmoothMap euclidean_map(const std::vector<std::string>& comps, int m) {
    return SmoothMap(ChartMetric::euclidean(m), ChartMetric::euclidean(static_cast<int>(comps.size())), exprs(comps, m));
}

SmoothMap cylinder_map(double p) {
    const Parameters params{{"p"}, {p}};
    return SmoothMap(ChartMetric::conformal(3, parse("(x1^2+x2^2)^(-1/p)", 3, params.names), params), ChartMetric::euclidean(2),
                     exprs({"sqrt(x1^2+x2^2)", "x3"}, 3, params.names), params);
}

double box_volume(const Box& b) {
    double v = 1.0;
    for (int i = 0; i < b.dim(); ++i) v *= b.upper[static_cast<std::size_t>(i)] - b.lower[static_cast<std::size_t>(i)];
    return v;
}

} // namespace

TEST_SUITE("mapcalc") {

TEST_CASE("differential and its norm") {
    const SmoothMap map = euclidean_map({"x1*x2", "x1^2 - x2"}, 2);
    const std::vector<double> x{2.0, 3.0};
    const Matrix<double> d = dmap(map, x);
    CHECK(d(0, 0) == doctest::Approx(3.0)); // d_1 (x1 x2)
    CHECK(d(1, 0) == doctest::Approx(2.0)); // d_2 (x1 x2)
    CHECK(d(0, 1) == doctest::Approx(4.0));
    CHECK(d(1, 1) == doctest::Approx(-1.0));
    CHECK(dmap_norm(map, x) == doctest::Approx(std::sqrt(9.0 + 4.0 + 16.0 + 1.0)));
}

TEST_CASE("Euclidean tension is the componentwise Laplacian") {
    const SmoothMap map = euclidean_map({"sin(x1)*cos(x2)", "x1*x2^2", "exp(x1-x2)"}, 2);
    const std::vector<double> x{0.4, -0.9};
    const auto t = tension(map, x);
    for (int a = 0; a < 3; ++a) {
        double lap = 0.0;
        for (int i = 0; i < 2; ++i)
            lap += test::partial([&](std::span<const double> y) { return dmap(map, y)(i, a); }, x, i);
        CHECK(std::fabs(t[static_cast<std::size_t>(a)] - lap) < 1e-9);
    }
}

TEST_CASE("p-tension on a conformal source matches the coordinate divergence") {
    // g = lambda delta on R^3: tau_p^a = lambda^{-3/2} d_i(lambda^{1/2} |dphi|^{p-2} d_i phi^a).
    const double p = 3.0;
    const SmoothMap map = cylinder_map(p);
    const std::vector<double> x{1.0, 0.7, 0.4};
    const auto lambda = [](std::span<const double> y) { return std::pow(y[0] * y[0] + y[1] * y[1], -1.0 / 3.0); };
    const auto t = p_tension(map, x, p);
    for (int a = 0; a < 2; ++a) {
        double div = 0.0;
        for (int i = 0; i < 3; ++i)
            div += test::partial(
                [&](std::span<const double> y) {
                    const Matrix<double> d = dmap(map, y);
                    double q = 0.0;
                    for (int k = 0; k < 3; ++k)
                        for (int b = 0; b < 2; ++b) q += d(k, b) * d(k, b);
                    q /= lambda(y);
                    return std::sqrt(lambda(y)) * std::pow(q, 0.5 * (p - 2.0)) * d(i, a);
                },
                x, i);
        CHECK(std::fabs(t[static_cast<std::size_t>(a)] - div / std::pow(lambda(x), 1.5)) < 1e-8);
    }
}

TEST_CASE("property: p-tension equals its divergence form on the corpus") {
    for (double p : {2.0, 3.0, 4.0}) {
        std::uint64_t seed = 31;
        for (const auto& entry : map_corpus(p))
            for (const auto& x : random_points(entry.box, 3, seed++)) {
                const auto a = p_tension(entry.map, x, p);
                const auto b = p_tension_divergence_form(entry.map, x, p);
                for (std::size_t k = 0; k < a.size(); ++k) CHECK(mixed_gap(a[k], b[k]) < 1e-10);
            }
    }
}

TEST_CASE("second fundamental form from the pull-back connection") {
    // B(d_i, d_j) = nabla^phi_i dphi(d_j) - dphi(Gamma^k_ij d_k)
    const auto corpus = map_corpus(3.0);
    for (const auto& entry : corpus) {
        const auto x = random_points(entry.box, 1, 77).front();
        const auto b = second_fundamental_form_map(entry.map, x);
        const Christoffel<double> gamma = christoffel(entry.map.source(), x);
        const Matrix<double> d = dmap(entry.map, x);
        const int m = entry.map.source_dim();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const auto v = pullback_derivative(differential_field(entry.map, j), i, x);
                for (std::size_t a = 0; a < v.size(); ++a) {
                    double expected = v[a];
                    for (int k = 0; k < m; ++k) expected -= gamma(k, i, j) * d(k, static_cast<int>(a));
                    CHECK(mixed_gap(b[a](i, j), expected) < 1e-12);
                }
            }
    }
}

TEST_CASE("inversion is p-harmonic at the critical exponent") {
    for (double p : {2.0, 3.0, 4.0}) {
        const double l = (3.0 + p - 2.0) / (p - 1.0);
        const std::string r = fmt::format("(x1^2+x2^2+x3^2)^({}/2)", l);
        const SmoothMap map = euclidean_map({"x1/" + r, "x2/" + r, "x3/" + r}, 3);
        for (const auto& x : random_points(Box{{0.5, 0.5, 0.5}, {2, 2, 2}}, 5, 3)) {
            for (double c : p_tension(map, x, p)) CHECK(std::fabs(c) < 1e-12);
        }
    }
}

TEST_CASE("cylinder map is p-biharmonic but not p-harmonic") {
    for (double p : {2.0, 3.0, 4.0}) {
        const SmoothMap map = cylinder_map(p);
        const std::vector<double> x{0.8, 1.3, -0.2};
        double t2 = 0.0;
        for (double c : p_bitension(map, x, p)) t2 = std::max(t2, std::fabs(c));
        CHECK(t2 < 1e-10);
        CHECK(target_norm(map, x, p_tension(map, x, p)) > 0.1);
    }
}

TEST_CASE("vanishing differential is a singularity only when p > 2") {
    const SmoothMap constant = euclidean_map({"1", "2"}, 2);
    const std::vector<double> x{0.3, 0.4};
    CHECK_THROWS_AS(p_tension(constant, x, 3.0), SingularityError);
    for (double c : p_tension(constant, x, 2.0)) CHECK(c == 0.0);
}

TEST_CASE("Gauss-Legendre rules") {
    for (int n : {2, 5, 8, 16}) {
        const QuadratureRule rule = gauss_legendre(n);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        double sum = 0.0;
        double top = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            sum += rule.weights[k];
            top += rule.weights[k] * std::pow(rule.nodes[k], 2 * n - 2);
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(top == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
    }
}

TEST_CASE("p-energy of identity and scaling maps") {
    const Box box{{0.0, -1.0}, {1.0, 1.0}};
    const double vol = box_volume(box);
    for (double p : {2.0, 3.0, 4.5}) {
        CHECK(p_energy_box(euclidean_map({"x1", "x2"}, 2), box, p) == doctest::Approx(std::pow(2.0, p / 2) / p * vol).epsilon(1e-13));
        const double s = 1.7;
        CHECK(p_energy_box(euclidean_map({"1.7*x1", "1.7*x2"}, 2), box, p) ==
              doctest::Approx(std::pow(2.0 * s * s, p / 2) / p * vol).epsilon(1e-13));
    }
}

TEST_CASE("energy quadrature of a non-polynomial map") {
    // E_2(sin) on [0, pi] is (1/2) int cos^2 = pi/4.
    const SmoothMap map = euclidean_map({"sin(x1)"}, 1);
    CHECK(p_energy_box(map, Box{{0.0}, {std::numbers::pi}}, 2.0, 16) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
}

TEST_CASE("energy picks up the source volume density") {
    // Identity out of a conformal chart g = lambda delta on R^2: |dphi|^2 = 2/lambda, sqrt(det g) = lambda,
    // so E_2 is the coordinate area.
    const SmoothMap map(space_form_chart(1.0, 2), ChartMetric::euclidean(2), exprs({"x1", "x2"}, 2));
    CHECK(p_energy_box(map, Box{{-0.5, -0.5}, {0.5, 1.0}}, 2.0, 16) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("p-bienergy of simple maps") {
    const Box box{{0.0}, {1.0}};
    CHECK(std::fabs(p_bienergy_box(euclidean_map({"x1"}, 1), box, 3.0)) < 1e-28);
    CHECK(p_bienergy_box(euclidean_map({"x1^2"}, 1), box, 2.0) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("second-variation smoke test: the bienergy is stationary at a p-biharmonic map") {
    const double p = 3.0;
    const SmoothMap base = cylinder_map(p);
    const Box box{{0.6, 0.6, 0.0}, {1.6, 1.6, 1.0}};
    std::string bump = "1";
    for (int i = 0; i < 3; ++i)
        bump += fmt::format("*((x{0}-({1}))*(({2})-x{0}))^3", i + 1, box.lower[static_cast<std::size_t>(i)], box.upper[static_cast<std::size_t>(i)]);
    for (const auto& field : std::vector<std::vector<std::string>>{{"1", "0"}, {"x2", "x1"}, {"0", "1+x3"}}) {
        std::vector<Expression> comps;
        for (std::size_t a = 0; a < 2; ++a) comps.push_back(parse("(" + field[a] + ")*" + bump, 3, {"p"}));
        const auto bienergy = [&](double t) {
            std::vector<Expression> c;
            for (std::size_t a = 0; a < 2; ++a) c.push_back(base.components()[a] + t * comps[a]);
            return p_bienergy_box(SmoothMap(base.source(), base.target(), c, base.parameters()), box, p, 16);
        };
        const double h = 1e-2;
        const double e0 = bienergy(0.0);
        const double ep = bienergy(h);
        const double em = bienergy(-h);
        const double first = (ep - em) / (2 * h);
        const double second = (ep - 2 * e0 + em) / (h * h);
        CHECK(second > 0.0);
        CHECK(std::fabs(first) < 1e-3 * second);
    }
}

}
