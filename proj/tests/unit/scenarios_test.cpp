#include "support.hpp"

#include "pbh/error.hpp"
#include "pbh/scenarios/builtins.hpp"
#include "pbh/scenarios/runner.hpp"
#include "pbh/scenarios/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <string>

using namespace pbh;
using Json = nlohmann::ordered_json;

namespace {

Json base_document() {
    return Json::parse(R"({
      "schema": "pbh/1",
      "name": "square",
      "kind": "map",
      "parameters": {"p": 3},
      "source": {"dim": 2, "metric": {"type": "euclidean"}},
      "target": {"dim": 2, "metric": {"type": "euclidean"}},
      "components": ["x1^2 - x2^2", "2*x1*x2"],
      "samples": {"box": {"lower": [0.5, 0.5], "upper": [1.5, 1.5]}, "points_per_axis": 2},
      "checks": ["p_harmonic", "stress_divergence"]
    })");
}

/// Field named by the SchemaError raised for a document, or "" if it parses.
std::string rejected_field(const Json& doc) {
    try {
        parse_scenario(doc.dump());
    } catch (const SchemaError& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST_SUITE("scenarios") {

TEST_CASE("a minimal document parses and round-trips") {
    const Scenario s = parse_scenario(base_document().dump());
    CHECK(s.name == "square");
    CHECK(s.parameters.get("p") == 3.0);
    CHECK(s.checks.size() == 2);
    CHECK(s.tolerance == 1e-7);
    const Scenario again = parse_scenario(scenario_to_json(s));
    CHECK(scenario_to_json(again) == scenario_to_json(s));
}

TEST_CASE("builtins round-trip through JSON") {
    for (const std::string name : {"inversion(2)", "inversion(4)", "proper_pbh_cylinder", "small_hypersphere(3, 0.5)"}) {
        const Scenario s = builtin(name);
        CHECK(scenario_to_json(parse_scenario(scenario_to_json(s))) == scenario_to_json(s));
    }
}

TEST_CASE("builtin arguments may be constant expressions") {
    const Scenario s = builtin("small_hypersphere(2, 1/sqrt(2))");
    CHECK(s.parameters.get("a") == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.parameters.get("p") == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(builtin("inversion(7)"), ConfigError);
    CHECK_THROWS_AS(builtin("small_hypersphere(2, 1.5)"), ConfigError);
    CHECK_THROWS_AS(builtin("nonsense"), ConfigError);
    CHECK(builtin_catalog().size() == 3);
}

TEST_CASE("schema rejection names the offending field") {
    Json d = base_document();
    d.erase("parameters");
    CHECK(rejected_field(d) == "parameters");

    d = base_document();
    d["schema"] = "pbh/2";
    CHECK(rejected_field(d) == "schema");

    d = base_document();
    d["kind"] = "surface";
    CHECK(rejected_field(d) == "kind");

    d = base_document();
    d["checks"][1] = "no_such_check";
    CHECK(rejected_field(d) == "checks[1]");

    d = base_document();
    d["components"][1] = "2*x1*";
    CHECK(rejected_field(d) == "components[1]");

    d = base_document();
    d["components"].push_back("x1");
    CHECK(rejected_field(d) == "components");

    d = base_document();
    d["parameters"]["p"] = 1.5;
    CHECK(rejected_field(d) == "parameters.p");

    d = base_document();
    d["source"]["metric"]["type"] = "wavy";
    CHECK(rejected_field(d) == "source.metric.type");

    d = base_document();
    d["samples"]["random"] = Json{{"count", 3}, {"seed", 1}};
    CHECK(rejected_field(d) == "samples");

    d = base_document();
    d["samples"]["box"]["upper"] = Json::array({1.5});
    CHECK(rejected_field(d) == "samples.box.upper");

    d = base_document();
    d["checks"] = Json::array({"theorem_2_1"});
    CHECK_FALSE(rejected_field(d).empty());

    CHECK(rejected_field(Json::parse("[1, 2]")) == "<document>");
    CHECK_THROWS_AS(parse_scenario("{ not json"), SchemaError);
}

TEST_CASE("grid samples run with the last axis fastest") {
    const Scenario s = parse_scenario(base_document().dump());
    const auto pts = sample_points(s);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == std::vector<double>{0.5, 0.5});
    CHECK(pts[1] == std::vector<double>{0.5, 1.5});
    CHECK(pts[2] == std::vector<double>{1.5, 0.5});
    CHECK(pts[3] == std::vector<double>{1.5, 1.5});
}

TEST_CASE("random samples are seeded and respect exclusions") {
    Json d = base_document();
    d["samples"].erase("points_per_axis");
    d["samples"]["box"] = Json{{"lower", {-1.0, -1.0}}, {"upper", {1.0, 1.0}}};
    d["samples"]["random"] = Json{{"count", 50}, {"seed", 9}};
    d["samples"]["exclusions"] = Json::array({Json{{"expr", "x1^2 + x2^2"}, {"less_than", 0.25}}});
    const Scenario s = parse_scenario(d.dump());
    const auto a = sample_points(s);
    const auto b = sample_points(s);
    REQUIRE(a.size() == 50);
    CHECK(a == b);
    for (const auto& x : a) CHECK(x[0] * x[0] + x[1] * x[1] >= 0.25);
}

TEST_CASE("run reports one row per point and check") {
    const Scenario s = parse_scenario(base_document().dump());
    const ResidualReport r = run(s);
    CHECK(r.rows.size() == 8);
    CHECK(r.rows[0].check == "p_harmonic");
    CHECK(r.rows[1].check == "stress_divergence");
    CHECK(r.rows[1].point_index == 0);
    // z^2 is harmonic but not p-harmonic for p = 3 (|dphi| is not constant)
    CHECK_FALSE(r.rows[0].pass);
    CHECK(r.rows[1].pass);
    CHECK_FALSE(r.verdict());
    CHECK(run(s, {{"p", 2.0}}).verdict());
}

TEST_CASE("overrides and tolerance") {
    const Scenario s = builtin("inversion(3)");
    CHECK(run(s).verdict());
    CHECK_FALSE(run(s, {{"l", 2.2}}).verdict());
    RunOptions loose;
    loose.tolerance = 10.0;
    CHECK(run(s, {{"l", 2.2}}, loose).verdict());
    CHECK_THROWS_AS(with_overrides(s, {{"nope", 1.0}}), Error);
}

TEST_CASE("singular points become NaN rows or abort in strict mode") {
    Json d = base_document();
    d["samples"]["box"] = Json{{"lower", {0.0, 0.0}}, {"upper", {1.0, 1.0}}};
    const Scenario s = parse_scenario(d.dump());
    const ResidualReport r = run(s);
    CHECK(std::isnan(r.rows[0].residual));
    CHECK_FALSE(r.rows[0].pass);
    CHECK_FALSE(r.rows[0].note.empty());
    RunOptions strict;
    strict.strict = true;
    CHECK_THROWS_AS(run(s, {}, strict), SingularityError);
}

TEST_CASE("zero crossings interpolate the signed residual") {
    const auto c = zero_crossings("x", {0.0, 1.0, 2.0, 3.0}, {-1.0, -0.5, 0.5, 1.0}, 1e-12);
    REQUIRE(c.size() == 1);
    CHECK(c[0].lower == 1.0);
    CHECK(c[0].upper == 2.0);
    CHECK(c[0].estimate == doctest::Approx(1.5));
    CHECK(zero_crossings("x", {0.0, 1.0}, {1.0, 2.0}, 1e-12).empty());
}

TEST_CASE("sweeping p locates 1/b^2 for a small hypersphere") {
    const double a = 0.8;
    const double p_star = 1.0 / (1.0 - a * a);
    const SweepReport r = sweep(builtin("small_hypersphere(2, 0.8)"), SweepSpec{"p", 2.0, 6.0, 41});
    REQUIRE_FALSE(r.crossings.empty());
    for (const auto& c : r.crossings) {
        CHECK(c.lower <= p_star);
        CHECK(c.upper >= p_star);
        CHECK(std::fabs(c.estimate - p_star) < 0.1);
    }
}

TEST_CASE("map sweeps have no signed residual but bottom out at the critical exponent") {
    const SweepReport r = sweep(builtin("inversion(3)"), SweepSpec{"l", 1.5, 3.0, 16});
    CHECK(r.crossings.empty());
    double best = INFINITY;
    double best_l = 0.0;
    for (const auto& row : r.report.rows)
        if (row.check == "p_harmonic" && row.point_index == 0 && row.residual < best) {
            best = row.residual;
            best_l = row.params.at(0);
        }
    CHECK(best_l == doctest::Approx(2.0));
    CHECK(best < 1e-12);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
    const Scenario s = builtin("proper_pbh_cylinder");
    RunOptions one;
    RunOptions four;
    four.jobs = 4;
    const ResidualReport a = run(s, {}, one);
    const ResidualReport b = run(s, {}, four);
    CHECK(to_csv(a) == to_csv(run(s, {}, one)));
    CHECK(to_csv(a) == to_csv(b));
    CHECK(to_json(a) == to_json(b));
}

TEST_CASE("CSV follows the column contract") {
    const ResidualReport r = run(builtin("inversion(3)"));
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("scenario,check,p,l,x1,x2,x3,residual_norm,pass\n", 0) == 0);
    const Json j = Json::parse(to_json(r));
    CHECK(j["verdict"] == "pass");
    CHECK(j["rows"].size() == r.rows.size());
}

}
