#include "support.hpp"

#include "pbh/error.hpp"
#include "pbh/expr/parser.hpp"
#include "pbh/scenarios/corpus.hpp"
#include "pbh/stress/stress.hpp"

#include <doctest.h>

#include <cmath>

using namespace pbh;
using pbh::test::mixed_gap;

namespace {

SmoothMap euclidean_map(const std::vector<std::string>& comps, int m) {
    std::vector<Expression> e;
    for (const auto& t : comps) e.push_back(parse(t, m));
    return SmoothMap(ChartMetric::euclidean(m), ChartMetric::euclidean(static_cast<int>(comps.size())), e);
}

} // namespace

TEST_SUITE("stress") {

TEST_CASE("bienergy stress of x -> x^2 on the line") {
    // tau = 2, nabla tau = 0: S = -|tau|^2/2 = -2.
    const SmoothMap map = euclidean_map({"x1^2"}, 1);
    const std::vector<double> x{0.7};
    CHECK(classical_stress_bienergy(map, x)(0, 0) == doctest::Approx(-2.0));
    CHECK(stress_tensor(map, x, 2.0).s(0, 0) == doctest::Approx(-2.0));
}

TEST_CASE("stress vanishes for p-harmonic maps") {
    const double p = 3.0;
    const SmoothMap inversion = euclidean_map({"x1/(x1^2+x2^2+x3^2)", "x2/(x1^2+x2^2+x3^2)", "x3/(x1^2+x2^2+x3^2)"}, 3);
    const StressTensorValue v = stress_tensor(inversion, std::vector<double>{0.8, 1.1, 0.6}, p);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::fabs(v.s(i, j)) < 1e-12);
}

TEST_CASE("property: the stress tensor is symmetric") {
    std::uint64_t seed = 41;
    for (const auto& entry : map_corpus(3.0))
        for (const auto& x : random_points(entry.box, 2, seed++)) {
            const auto s = stress_tensor(entry.map, x, 3.0).s;
            for (int i = 0; i < s.rows(); ++i)
                for (int j = 0; j < s.cols(); ++j) CHECK(s(i, j) == s(j, i));
        }
}

TEST_CASE("theta pairs the weighted differential with the p-tension") {
    const double p = 4.0;
    for (const auto& entry : map_corpus(p)) {
        const auto x = random_points(entry.box, 1, 42).front();
        const ThetaForm th = theta(entry.map, x, p);
        const auto tp = p_tension(entry.map, x, p);
        const Matrix<double> d = dmap(entry.map, x);
        const Matrix<double> h = entry.map.target().metric(entry.map(x));
        const double f = std::pow(dmap_norm(entry.map, x), p - 2.0);
        for (int i = 0; i < entry.map.source_dim(); ++i) {
            std::vector<double> col;
            for (int a = 0; a < entry.map.target_dim(); ++a) col.push_back(d(i, a));
            CHECK(mixed_gap(th.components[static_cast<std::size_t>(i)], f * bilinear(h, col, tp)) < 1e-12);
        }
    }
}

TEST_CASE("property: div theta = |tau_p|^2 + |dphi|^{p-2} <dphi, nabla tau_p>") {
    for (double p : {2.0, 3.0, 4.0}) {
        std::uint64_t seed = 43;
        for (const auto& entry : map_corpus(p))
            for (const auto& x : random_points(entry.box, 2, seed++)) {
                const StressTensorValue v = stress_tensor(entry.map, x, p);
                CHECK(mixed_gap(theta_divergence(entry.map, x, p), v.tau_p_squared + v.weight * v.inner) < 1e-10);
            }
    }
}

TEST_CASE("property: trace forms and the p = m specialization") {
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        std::uint64_t seed = 44;
        for (const auto& entry : map_corpus(p))
            for (const auto& x : random_points(entry.box, 2, seed++)) {
                const StressTrace t = stress_trace_forms(entry.map, x, p);
                CHECK(mixed_gap(t.direct, t.inner_form) < 1e-10);
                CHECK(mixed_gap(t.direct, t.theta_form) < 1e-10);
                const double m = entry.map.source_dim();
                if (m == p) CHECK(mixed_gap(t.direct, -0.5 * m * t.tau_p_squared) < 1e-12);
            }
    }
}

TEST_CASE("property: divergence identity on seeded random cubics") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const SmoothMap map = random_cubic_map(seed);
        for (const auto& x : random_points(Box{{-0.7, -0.7}, {0.7, 0.7}}, 3, seed + 100))
            for (double p : {2.0, 2.5, 3.0, 4.0}) {
                const StressDivergence d = stress_divergence_check(map, x, p);
                CHECK(d.gap < 1e-9 * std::max(1.0, d.scale));
            }
    }
}

TEST_CASE("divergence identity is not vacuous") {
    const double p = 3.0;
    const SmoothMap map = random_cubic_map(7);
    const StressDivergence d = stress_divergence_check(map, std::vector<double>{0.3, -0.2}, p);
    CHECK(d.scale > 1e-2);
}

TEST_CASE("p = 2 stress equals the bienergy stress on the corpus") {
    std::uint64_t seed = 45;
    for (const auto& entry : map_corpus(2.0))
        for (const auto& x : random_points(entry.box, 2, seed++)) {
            const auto s = stress_tensor(entry.map, x, 2.0).s;
            const auto c = classical_stress_bienergy(entry.map, x);
            for (int i = 0; i < s.rows(); ++i)
                for (int j = 0; j < s.cols(); ++j) CHECK(mixed_gap(s(i, j), c(i, j)) < 1e-11);
        }
}

TEST_CASE("stress at a critical point of the map is singular for p > 2") {
    const SmoothMap map = euclidean_map({"x1^2 + x2^2", "x1*x2"}, 2);
    CHECK_THROWS_AS(stress_tensor(map, std::vector<double>{0.0, 0.0}, 3.0), SingularityError);
    CHECK_NOTHROW(stress_tensor(map, std::vector<double>{0.0, 0.0}, 2.0));
}

}
