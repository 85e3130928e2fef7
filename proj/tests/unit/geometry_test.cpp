#include "support.hpp"

#include "pbh/error.hpp"
#include "pbh/expr/parser.hpp"
#include "pbh/geometry/chart.hpp"

#include <doctest.h>

#include <cmath>

using namespace pbh;

namespace {

ChartMetric general_metric() {
    std::vector<std::vector<Expression>> g = {{parse("2+sin(x1)*x2", 2), parse("0.3*x1", 2)},
                                              {parse("0.3*x1", 2), parse("1+x2^2", 2)}};
    return ChartMetric(2, std::move(g));
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("conformal Christoffel symbols match the closed form") {
    // g = lambda delta: Gamma^k_ij = (delta_jk d_i lambda + delta_ik d_j lambda - delta_ij d_k lambda) / (2 lambda).
    const Expression lambda = parse("exp(0.4*x1 - 0.2*x2^2) * (1 + x3^2)", 3);
    const ChartMetric chart = ChartMetric::conformal(3, lambda);
    const std::vector<double> x{0.3, -0.7, 0.5};
    const double l = lambda.evaluate(x, {});
    std::vector<double> dl;
    for (int i = 0; i < 3; ++i) dl.push_back(test::partial([&](std::span<const double> y) { return lambda.evaluate(y, {}); }, x, i));
    const Christoffel<double> gamma = christoffel(chart, x);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double expected = ((j == k) * dl[static_cast<std::size_t>(i)] + (i == k) * dl[static_cast<std::size_t>(j)] -
                                         (i == j) * dl[static_cast<std::size_t>(k)]) /
                                        (2.0 * l);
                CHECK(std::fabs(gamma(k, i, j) - expected) < 1e-9);
            }
}

TEST_CASE("orthonormal frame of diag(4, 9)") {
    const ChartMetric chart(2, {{parse("4", 2), parse("0", 2)}, {parse("0", 2), parse("9", 2)}});
    const Frame f = orthonormal_frame(chart, std::vector<double>{0.1, 0.2});
    REQUIRE(f.vectors.size() == 2);
    CHECK(f.vectors[0][0] == doctest::Approx(0.5));
    CHECK(f.vectors[0][1] == doctest::Approx(0.0));
    CHECK(f.vectors[1][0] == doctest::Approx(0.0));
    CHECK(f.vectors[1][1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("scalar curvature of space forms is d(d-1)c") {
    CHECK(scalar_curvature(space_form_chart(1.0, 2), std::vector<double>{0.3, -0.2}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(scalar_curvature(space_form_chart(-1.0, 3), std::vector<double>{0.1, 0.2, -0.3}) == doctest::Approx(-6.0).epsilon(1e-12));
    CHECK(std::fabs(scalar_curvature(space_form_chart(0.0, 4), std::vector<double>{0.1, 0.2, -0.3, 0.4})) < 1e-14);
}

TEST_CASE("space-form tag and conformal factor") {
    const ChartMetric s = space_form_chart(4.0, 2);
    REQUIRE(s.space_form_curvature().has_value());
    CHECK(*s.space_form_curvature() == 4.0);
    // (1 + |x|^2)^(-2) at |x| = 1
    CHECK(s.metric(std::vector<double>{1.0, 0.0})(0, 0) == doctest::Approx(0.25));
    CHECK(ChartMetric::euclidean(2).space_form_curvature() == 0.0);
    CHECK_FALSE(ChartMetric::conformal(2, parse("1+x1^2", 2)).space_form_curvature().has_value());
}

TEST_CASE("property: space forms have constant sectional curvature") {
    std::mt19937_64 rng(11);
    for (double c : {1.0, -1.0, 0.25}) {
        const ChartMetric chart = space_form_chart(c, 3);
        for (int k = 0; k < 20; ++k) {
            const auto x = test::uniform_point(rng, 3, -0.6, 0.6);
            const auto u = test::uniform_point(rng, 3, -1.0, 1.0);
            const auto v = test::uniform_point(rng, 3, -1.0, 1.0);
            CHECK(std::fabs(sectional_curvature(chart, x, u, v) - c) < 1e-10);
        }
    }
}

TEST_CASE("curvature tensor symmetries on a general metric") {
    const ChartMetric chart = general_metric();
    const Curvature r = curvature_tensor(chart, std::vector<double>{0.4, 0.2});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    CHECK(r.low(i, j, k, l) == doctest::Approx(-r.low(j, i, k, l)).epsilon(1e-12));
                    CHECK(r.low(i, j, k, l) == doctest::Approx(-r.low(i, j, l, k)).epsilon(1e-12));
                    CHECK(r.low(i, j, k, l) == doctest::Approx(r.low(k, l, i, j)).epsilon(1e-12));
                }
}

TEST_CASE("property: metric compatibility via jets") {
    const ChartMetric chart = general_metric();
    std::mt19937_64 rng(12);
    for (int n = 0; n < 20; ++n) {
        const auto x = test::uniform_point(rng, 2, -0.5, 0.5);
        const auto jets = seed_point(x, 1);
        const MetricAt<Jet> gj = metric_at<Jet>(chart, std::span<const Jet>(jets));
        const Christoffel<double> gamma = christoffel(chart, x);
        const Matrix<double> g = chart.metric(x);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double cov = gj.g(i, j).partial(k).value();
                    for (int l = 0; l < 2; ++l) cov -= gamma(l, k, i) * g(l, j) + gamma(l, k, j) * g(i, l);
                    CHECK(std::fabs(cov) < 1e-12);
                }
    }
}

TEST_CASE("gradient raises the differential") {
    const ChartMetric chart = general_metric();
    const Expression f = parse("x1^2*x2 + cos(x2)", 2);
    const std::vector<double> x{0.3, 0.8};
    const auto grad = gradient(chart, scalar_field(f, {}), x);
    const Matrix<double> g = chart.metric(x);
    for (int i = 0; i < 2; ++i) {
        const double lowered = g(i, 0) * grad[0] + g(i, 1) * grad[1];
        CHECK(lowered == doctest::Approx(f.derivative(i).evaluate(x, {})).epsilon(1e-13));
    }
}

TEST_CASE("divergence matches the density formula") {
    // div X = (1/sqrt det g) d_i (sqrt det g X^i)
    const ChartMetric chart = general_metric();
    const std::vector<Expression> field = {parse("x1*x2 + 1", 2), parse("sin(x1) - x2^2", 2)};
    const std::vector<double> x{0.2, -0.4};
    const auto density = [&](std::span<const double> y) {
        const Matrix<double> g = chart.metric(y);
        return std::sqrt(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0));
    };
    double oracle = 0.0;
    for (int i = 0; i < 2; ++i)
        oracle += test::partial([&](std::span<const double> y) { return density(y) * field[static_cast<std::size_t>(i)].evaluate(y, {}); }, x, i);
    oracle /= density(x);
    CHECK(std::fabs(divergence(chart, vector_field(field, {}), x) - oracle) < 1e-9);
}

TEST_CASE("divergence of f g is df") {
    const ChartMetric chart = general_metric();
    const Expression f = parse("exp(x1)*x2 + x2^3", 2);
    const TensorField t = [&](std::span<const double> y, int order) {
        const auto jets = seed_point(y, order);
        const Jet fj = f.evaluate(std::span<const Jet>(jets), {});
        Matrix<Jet> g = metric_at<Jet>(chart, std::span<const Jet>(jets)).g;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = fj * g(i, j);
        return g;
    };
    const std::vector<double> x{0.5, -0.3};
    const auto div = divergence_2tensor(chart, t, x);
    for (int k = 0; k < 2; ++k)
        CHECK(std::fabs(div[static_cast<std::size_t>(k)] - test::partial([&](std::span<const double> y) { return f.evaluate(y, {}); }, x, k)) < 1e-9);
}

TEST_CASE("non positive-definite metrics are rejected") {
    const ChartMetric bad(2, {{parse("1", 2), parse("2", 2)}, {parse("2", 2), parse("1", 2)}});
    CHECK_THROWS_AS(christoffel(bad, std::vector<double>{0.0, 0.0}), DegenerateError);
}

TEST_CASE("metric dimension mismatches are configuration errors") {
    CHECK_THROWS_AS(ChartMetric::euclidean(2).metric(std::vector<double>{1.0, 2.0, 3.0}), ConfigError);
}

}
