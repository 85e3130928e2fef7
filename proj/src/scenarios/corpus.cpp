#include "pbh/scenarios/corpus.hpp"

#include "pbh/expr/parser.hpp"
#include "pbh/expr/random_expression.hpp"
#include "pbh/scenarios/builtins.hpp"

#include <fmt/format.h>

#include <random>

namespace pbh {
namespace {

std::vector<Expression> parse_all(const std::vector<std::string>& texts, int dim, const Parameters& params = {}) {
    std::vector<Expression> out;
    for (const auto& t : texts) out.push_back(parse(t, dim, params.names));
    return out;
}

Box cube(int d, double lo, double hi) {
    return {std::vector<double>(static_cast<std::size_t>(d), lo), std::vector<double>(static_cast<std::size_t>(d), hi)};
}

CorpusImmersion hypersphere(int m, double a) {
    const Scenario s = small_hypersphere_scenario(m, a);
    return {s.name, Immersion(space_form_chart(1.0, m + 1), parse_all(s.components, m, s.parameters), m, s.parameters), s.samples.box};
}

} // namespace

SmoothMap random_cubic_map(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const char* monomials[] = {"x1^2", "x1*x2", "x2^2", "x1^3", "x1^2*x2", "x1*x2^2", "x2^3"};
    std::vector<std::string> comps = {"x1", "x2"};
    for (auto& c : comps)
        for (const char* mono : monomials) c += fmt::format("+({})*{}", 0.3 * unit_uniform(rng()) - 0.15, mono);
    return SmoothMap(ChartMetric::euclidean(2), ChartMetric::euclidean(2), parse_all(comps, 2));
}

std::vector<CorpusMap> map_corpus(double p) {
    Parameters pp{{"p"}, {p}};
    std::vector<CorpusMap> out;
    out.push_back({"proper_pbh_cylinder",
                   SmoothMap(ChartMetric::conformal(3, parse("(x1^2+x2^2)^(-1/p)", 3, pp.names), pp), ChartMetric::euclidean(2),
                             parse_all({"sqrt(x1^2+x2^2)", "x3"}, 3, pp), pp),
                   cube(3, 0.5, 2.0)});
    out.push_back({"random_cubic", random_cubic_map(20261018), cube(2, -0.8, 0.8)});
    out.push_back({"inversion_off_critical",
                   SmoothMap(ChartMetric::euclidean(3), ChartMetric::euclidean(3),
                             parse_all({"x1/(x1^2+x2^2+x3^2)^1.1", "x2/(x1^2+x2^2+x3^2)^1.1", "x3/(x1^2+x2^2+x3^2)^1.1"}, 3)),
                   cube(3, 0.5, 2.0)});
    out.push_back({"hyperbolic_plane_to_sphere",
                   SmoothMap(space_form_chart(-0.5, 2), space_form_chart(1.0, 3),
                             parse_all({"x1+0.2*x2^2", "x2-0.1*x1*x2", "0.3*x1^2+0.1*x2"}, 2)),
                   cube(2, -0.6, 0.6)});
    out.push_back({"conformal_graph",
                   SmoothMap(ChartMetric::conformal(2, parse("exp(0.3*x1-0.2*x2^2)", 2)), ChartMetric::euclidean(3),
                             parse_all({"x1", "x2", "sin(x1)*cos(x2)"}, 2)),
                   cube(2, -1.0, 1.0)});
    {
        std::vector<std::vector<Expression>> g = {{parse("1+x1^2", 2), parse("0.3*x1*x2", 2)},
                                                  {parse("0.3*x1*x2", 2), parse("1+x2^2", 2)}};
        out.push_back({"general_metric_to_sphere",
                       SmoothMap(ChartMetric(2, std::move(g)), space_form_chart(1.0, 2), parse_all({"x1*cos(x2)", "x1*sin(x2)+0.2"}, 2)),
                       cube(2, 0.5, 1.5)});
    }
    return out;
}

std::vector<CorpusImmersion> immersion_corpus() {
    const std::vector<std::string> graph = {"x1", "x2", "0.3*x1^2+0.2*x1*x2-0.1*x2^3+0.1"};
    std::vector<CorpusImmersion> out;
    out.push_back({"graph_in_euclidean_3", Immersion(space_form_chart(0.0, 3), parse_all(graph, 2), 2), cube(2, -0.5, 0.5)});
    out.push_back({"graph_in_sphere_3", Immersion(space_form_chart(1.0, 3), parse_all(graph, 2), 2), cube(2, -0.5, 0.5)});
    out.push_back({"graph_in_hyperbolic_3", Immersion(space_form_chart(-1.0, 3), parse_all(graph, 2), 2), cube(2, -0.5, 0.5)});
    out.push_back({"plane_curve", Immersion(space_form_chart(0.0, 2), parse_all({"x1", "0.5*sin(x1)+0.2*x1^2"}, 1), 1), cube(1, -1.0, 1.0)});
    out.push_back({"surface_in_euclidean_4",
                   Immersion(space_form_chart(0.0, 4), parse_all({"x1", "x2", "0.3*x1^2+x1*x2", "sin(x1)*x2"}, 2), 2),
                   cube(2, -0.5, 0.5)});
    out.push_back({"graph_in_sphere_4",
                   Immersion(space_form_chart(1.0, 4), parse_all({"x1", "x2", "x3", "0.2*x1^2-0.1*x2*x3+0.15*x3^2*x1"}, 3), 3),
                   cube(3, -0.4, 0.4)});
    out.push_back(hypersphere(2, 0.8));
    out.push_back(hypersphere(3, 0.6));
    return out;
}

std::vector<std::vector<double>> random_points(const Box& box, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> out;
    for (int k = 0; k < count; ++k) {
        std::vector<double> x;
        for (int i = 0; i < box.dim(); ++i) {
            const auto iu = static_cast<std::size_t>(i);
            x.push_back(box.lower[iu] + unit_uniform(rng()) * (box.upper[iu] - box.lower[iu]));
        }
        out.push_back(std::move(x));
    }
    return out;
}

} // namespace pbh
