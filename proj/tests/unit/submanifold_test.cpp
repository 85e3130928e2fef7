#include "support.hpp"

#include "pbh/error.hpp"
#include "pbh/expr/parser.hpp"
#include "pbh/scenarios/builtins.hpp"
#include "pbh/scenarios/corpus.hpp"
#include "pbh/submanifold/immersion.hpp"

#include <doctest.h>

#include <cmath>

using namespace pbh;
using pbh::test::mixed_gap;

namespace {

Immersion immersion(double c, int ambient, const std::vector<std::string>& comps, int m, const Parameters& params = {}) {
    std::vector<Expression> e;
    for (const auto& t : comps) e.push_back(parse(t, m, params.names));
    return Immersion(space_form_chart(c, ambient), e, m, params);
}

Immersion hypersphere(int m, double a) {
    const Scenario s = small_hypersphere_scenario(m, a);
    return immersion(1.0, m + 1, s.components, m, s.parameters);
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

} // namespace

TEST_SUITE("submanifold") {

TEST_CASE("circle of radius 2 has curvature 1/2 pointing inward") {
    const Immersion circle = immersion(0.0, 2, {"2*cos(x1)", "2*sin(x1)"}, 1);
    const std::vector<double> x{0.7};
    const auto h = mean_curvature(circle, x);
    CHECK(mean_curvature_norm(circle, x) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(h[0] == doctest::Approx(-0.5 * std::cos(0.7)).epsilon(1e-13));
    CHECK(h[1] == doctest::Approx(-0.5 * std::sin(0.7)).epsilon(1e-13));
}

TEST_CASE("round sphere of radius R in R^3") {
    const double r = 1.5;
    const Immersion sphere = immersion(0.0, 3, {"1.5*sin(x1)*cos(x2)", "1.5*sin(x1)*sin(x2)", "1.5*cos(x1)"}, 2);
    const std::vector<double> x{1.1, 0.3};
    CHECK(mean_curvature_norm(sphere, x) == doctest::Approx(1.0 / r).epsilon(1e-12));
    CHECK(shape_operator_norm_squared(sphere, x) == doctest::Approx(2.0 / (r * r)).epsilon(1e-12));
    // mc - |A|^2 = -2/R^2 and m|H|^2 = 2/R^2, so p* = 1.
    const ProperP pp = cmc_proper_p(sphere, x);
    CHECK(pp.p_star == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(pp.admissible);
}

TEST_CASE("graph at a critical point: H is half the trace of the Hessian") {
    const Immersion graph = immersion(0.0, 3, {"x1", "x2", "(0.8*x1^2 + 0.3*x2^2)/2"}, 2);
    const auto h = mean_curvature(graph, std::vector<double>{0.0, 0.0});
    CHECK(std::fabs(h[0]) < 1e-15);
    CHECK(std::fabs(h[1]) < 1e-15);
    CHECK(h[2] == doctest::Approx(0.55).epsilon(1e-14));
    const Matrix<double> a = shape_operator(graph, std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0, 1.0});
    CHECK(a(0, 0) == doctest::Approx(0.8));
    CHECK(a(1, 1) == doctest::Approx(0.3));
    CHECK(std::fabs(a(0, 1)) < 1e-15);
}

TEST_CASE("property: normal frames are orthonormal and normal") {
    std::uint64_t seed = 21;
    for (const auto& entry : immersion_corpus()) {
        const Immersion& imm = entry.immersion;
        for (const auto& x : random_points(entry.box, 3, seed++)) {
            const NormalFrame f = normal_frame(imm, x);
            REQUIRE(static_cast<int>(f.vectors.size()) == imm.codim());
            const Matrix<double> d = dmap(imm.map(), x);
            for (std::size_t a = 0; a < f.vectors.size(); ++a) {
                for (std::size_t b = 0; b < f.vectors.size(); ++b)
                    CHECK(std::fabs(ambient_inner(imm, x, f.vectors[a], f.vectors[b]) - (a == b ? 1.0 : 0.0)) < 1e-12);
                for (int i = 0; i < imm.dim(); ++i) {
                    std::vector<double> col;
                    for (int k = 0; k < imm.ambient_dim(); ++k) col.push_back(d(i, k));
                    CHECK(std::fabs(ambient_inner(imm, x, f.vectors[a], col)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("property: shape operators are self-adjoint and trace to m h(H, xi)") {
    std::uint64_t seed = 22;
    for (const auto& entry : immersion_corpus()) {
        const Immersion& imm = entry.immersion;
        const int m = imm.dim();
        for (const auto& x : random_points(entry.box, 2, seed++)) {
            const Matrix<double> g = imm.induced_metric().metric(x);
            const auto hvec = mean_curvature(imm, x);
            for (const auto& xi : normal_frame(imm, x).vectors) {
                const Matrix<double> a = shape_operator(imm, x, xi);
                double trace = 0.0;
                for (int i = 0; i < m; ++i) {
                    trace += a(i, i);
                    for (int j = 0; j < m; ++j) {
                        double gij = 0.0;
                        double gji = 0.0;
                        for (int k = 0; k < m; ++k) {
                            gij += g(j, k) * a(k, i);
                            gji += g(i, k) * a(k, j);
                        }
                        CHECK(std::fabs(gij - gji) < 1e-11);
                    }
                }
                CHECK(std::fabs(trace - m * ambient_inner(imm, x, hvec, xi)) < 1e-11);
            }
        }
    }
}

TEST_CASE("normal projection is idempotent and kills tangent vectors") {
    const auto corpus = immersion_corpus();
    const auto& entry = corpus[4]; // codimension 2
    const Immersion& imm = entry.immersion;
    const auto x = random_points(entry.box, 1, 5).front();
    const std::vector<double> v{0.3, -1.2, 0.7, 2.0};
    const auto pv = normal_projection(imm, x, v);
    const auto ppv = normal_projection(imm, x, pv);
    for (std::size_t a = 0; a < v.size(); ++a) CHECK(std::fabs(pv[a] - ppv[a]) < 1e-13);
    const Matrix<double> d = dmap(imm.map(), x);
    std::vector<double> col;
    for (int k = 0; k < imm.ambient_dim(); ++k) col.push_back(d(1, k));
    CHECK(norm(normal_projection(imm, x, col)) < 1e-13);
}

TEST_CASE("small hyperspheres: invariants in closed form") {
    for (int m : {1, 2, 3}) {
        for (double a : {0.5, 0.6, 0.8}) {
            const Immersion imm = hypersphere(m, a);
            const double b = std::sqrt(1.0 - a * a);
            for (const auto& x : random_points(Box{std::vector<double>(static_cast<std::size_t>(m), -1.0), std::vector<double>(static_cast<std::size_t>(m), 1.0)}, 3, 9)) {
                CHECK(mean_curvature_norm(imm, x) == doctest::Approx(b / a).epsilon(1e-10));
                CHECK(shape_operator_norm_squared(imm, x) == doctest::Approx(m * b * b / (a * a)).epsilon(1e-10));
                const ProperP pp = cmc_proper_p(imm, x);
                CHECK(pp.p_star == doctest::Approx(1.0 / (b * b)).epsilon(1e-10));
                CHECK(pp.admissible == (1.0 / (b * b) >= 2.0));
                CHECK(norm(normal_derivative_H(imm, x, 0)) < 1e-10);
                CHECK(norm(normal_laplacian_H(imm, x)) < 1e-9);
            }
        }
    }
}

TEST_CASE("constant mean curvature detection") {
    const auto pts = random_points(Box{{-1, -1}, {1, 1}}, 6, 4);
    CHECK(has_constant_mean_curvature(hypersphere(2, 0.7), pts));
    CHECK_FALSE(has_constant_mean_curvature(immersion(0.0, 3, {"x1", "x2", "x1^2 + 0.5*x2^3"}, 2), pts));
}

TEST_CASE("hypersphere residuals vanish exactly at p = 1/b^2") {
    const double a = 0.8;
    const double p = 1.0 / (1.0 - a * a);
    const Immersion imm = hypersphere(2, a);
    const std::vector<double> x{0.3, -0.4};
    const auto t1 = theorem21_residuals(imm, x, p);
    const auto t3 = theorem23_residuals(imm, x, p);
    CHECK(t1.normal_norm < 1e-10);
    CHECK(t1.tangent_norm < 1e-10);
    CHECK(std::fabs(t3.normal) < 1e-10);
    CHECK(t3.tangent_norm < 1e-10);
    CHECK(theorem21_residuals(imm, x, p + 0.3).normal_norm > 1e-2);
}

TEST_CASE("totally geodesic equator is p-biharmonic for every p") {
    const Immersion equator = immersion(1.0, 3, {"x1", "x2", "0"}, 2);
    const std::vector<double> x{0.2, -0.5};
    CHECK(mean_curvature_norm(equator, x) < 1e-15);
    for (double p : {2.0, 3.0, 5.0}) {
        const auto r = theorem21_residuals(equator, x, p);
        CHECK(r.normal_norm < 1e-14);
        CHECK(r.tangent_norm < 1e-14);
    }
    CHECK_THROWS_AS(theorem23_residuals(equator, x, 3.0), DomainError);
}

TEST_CASE("property: the characterization system is a fixed multiple of the bitension field") {
    // normal and tangent parts of tau_{2,p}(inclusion) = m^{p-1} x (normal, tangent) residuals
    std::uint64_t seed = 23;
    for (const auto& entry : immersion_corpus()) {
        const Immersion& imm = entry.immersion;
        const double m = imm.dim();
        const auto x = random_points(entry.box, 1, seed++).front();
        for (double p : {2.0, 2.5, 4.0}) {
            const auto t2 = p_bitension(imm.map(), x, p);
            const auto normal = normal_projection(imm, x, t2);
            const auto r = theorem21_residuals(imm, x, p);
            for (std::size_t a = 0; a < normal.size(); ++a) CHECK(mixed_gap(normal[a], std::pow(m, p - 1) * r.normal[a]) < 1e-9);
            // tangent part in source components: g^{ki} h(tau_{2,p}, dphi(d_i))
            const Matrix<double> d = dmap(imm.map(), x);
            const Matrix<double> ginv = inverse_spd(imm.induced_metric().metric(x));
            for (int k = 0; k < imm.dim(); ++k) {
                double t = 0.0;
                for (int i = 0; i < imm.dim(); ++i) {
                    std::vector<double> col;
                    for (int c = 0; c < imm.ambient_dim(); ++c) col.push_back(d(i, c));
                    t += ginv(k, i) * ambient_inner(imm, x, t2, col);
                }
                CHECK(mixed_gap(t, std::pow(m, p - 1) * r.tangent[static_cast<std::size_t>(k)]) < 1e-9);
            }
        }
    }
}

TEST_CASE("untagged ambient charts have no curvature constant") {
    const Immersion imm(ChartMetric::conformal(3, parse("1 + x1^2", 3)),
                        {parse("x1", 2), parse("x2", 2), parse("0", 2)}, 2);
    CHECK_THROWS_AS(imm.ambient_curvature(), ConfigError);
    CHECK(immersion(-1.0, 3, {"x1", "x2", "0"}, 2).ambient_curvature() == -1.0);
}

TEST_CASE("rank loss is a degeneracy") {
    const Immersion flat = immersion(0.0, 3, {"x1", "x1", "0"}, 2);
    CHECK_THROWS_AS(flat.check_rank(std::vector<double>{0.1, 0.2}), DegenerateError);
}

TEST_CASE("isometry defect against a user-supplied source metric") {
    const Immersion plane = immersion(0.0, 3, {"x1", "x2", "0"}, 2);
    const std::vector<double> x{0.4, 0.1};
    CHECK(plane.isometry_defect(ChartMetric::euclidean(2), x) < 1e-15);
    CHECK(plane.isometry_defect(ChartMetric::conformal(2, parse("4", 2)), x) == doctest::Approx(3.0));
}

}
