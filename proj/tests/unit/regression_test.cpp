#include "support.hpp"

#include "pbh/scenarios/corpus.hpp"
#include "pbh/stress/stress.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <string>

using namespace pbh;
using pbh::test::mixed_gap;
using Json = nlohmann::json;

namespace {

Json load_fixtures() {
    std::ifstream in(std::string(PBH_FIXTURE_DIR) + "/regression.json");
    REQUIRE(in.good());
    return Json::parse(in)["fixtures"];
}

const SmoothMap& corpus_map(const std::vector<CorpusMap>& corpus, const std::string& name) {
    for (const auto& e : corpus)
        if (e.name == name) return e.map;
    FAIL("unknown corpus map " << name);
    throw;
}

using Quantity = std::function<double(const SmoothMap&, std::span<const double>, double)>;

const std::map<std::string, Quantity>& quantities() {
    static const std::map<std::string, Quantity> table = {
        {"stress_00", [](const SmoothMap& f, std::span<const double> x, double p) { return stress_tensor(f, x, p).s(0, 0); }},
        {"stress_01", [](const SmoothMap& f, std::span<const double> x, double p) { return stress_tensor(f, x, p).s(0, 1); }},
        {"stress_22", [](const SmoothMap& f, std::span<const double> x, double p) { return stress_tensor(f, x, p).s(2, 2); }},
        {"tau_p_squared", [](const SmoothMap& f, std::span<const double> x, double p) { return stress_tensor(f, x, p).tau_p_squared; }},
        {"stress_trace", [](const SmoothMap& f, std::span<const double> x, double p) { return stress_trace(f, x, p); }},
        {"tau_p_0", [](const SmoothMap& f, std::span<const double> x, double p) { return p_tension(f, x, p)[0]; }},
        {"tau_p_1", [](const SmoothMap& f, std::span<const double> x, double p) { return p_tension(f, x, p)[1]; }},
        {"tau_p_2", [](const SmoothMap& f, std::span<const double> x, double p) { return p_tension(f, x, p)[2]; }},
        {"tau_p_norm", [](const SmoothMap& f, std::span<const double> x, double p) { return target_norm(f, x, p_tension(f, x, p)); }},
        {"tau_2p_norm", [](const SmoothMap& f, std::span<const double> x, double p) { return target_norm(f, x, p_bitension(f, x, p)); }},
    };
    return table;
}

} // namespace

TEST_SUITE("regression") {

TEST_CASE("stored values are reproduced") {
    for (const auto& fx : load_fixtures()) {
        const double p = fx["p"];
        const auto corpus = map_corpus(p);
        const SmoothMap& map = corpus_map(corpus, fx["map"]);
        const std::vector<double> x = fx["point"];
        const double tol = fx["tolerance"];
        for (const auto& [key, value] : fx["expected"].items()) {
            INFO(fx["name"].get<std::string>() << " " << key);
            REQUIRE(quantities().count(key) == 1);
            CHECK(mixed_gap(quantities().at(key)(map, x, p), value.get<double>()) < tol);
        }
    }
}

TEST_CASE("cylinder fixture: S = -lambda g at the sample point") {
    const double lambda = std::pow(2.0, -1.0 / 3.0);
    for (const auto& fx : load_fixtures())
        if (fx["name"] == "cylinder_stress") {
            CHECK(fx["expected"]["stress_00"].get<double>() == doctest::Approx(-lambda).epsilon(1e-15));
            CHECK(fx["expected"]["stress_22"].get<double>() == doctest::Approx(-lambda).epsilon(1e-15));
            const double m = 3.0;
            CHECK(fx["expected"]["stress_trace"].get<double>() == doctest::Approx(-0.5 * m * fx["expected"]["tau_p_squared"].get<double>()));
        }
}

TEST_CASE("inversion fixture: radial closed form") {
    const double n = 3.0;
    const double p = 3.0;
    const double l = 2.2;
    const double s = l * (p - 1.0);
    const double k = n - 1.0 + (1.0 - l) * (1.0 - l);
    const double r2 = 3.0;
    const double component = -std::pow(k, 0.5 * (p - 2.0)) * (s + l * (n - 1.0 - s)) * std::pow(r2, -0.5 * (s + 2.0));
    for (const auto& fx : load_fixtures())
        if (fx["name"] == "inversion_off_critical_tension") {
            for (const char* key : {"tau_p_0", "tau_p_1", "tau_p_2"})
                CHECK(fx["expected"][key].get<double>() == doctest::Approx(component).epsilon(1e-13));
            CHECK(fx["expected"]["tau_p_norm"].get<double>() == doctest::Approx(std::sqrt(3.0) * component).epsilon(1e-13));
        }
}

TEST_CASE("cubic fixtures: divergence form and stress identity hold at the stored point") {
    const std::vector<double> x{0.3, -0.2};
    for (double p : {2.0, 3.0, 4.0}) {
        const auto corpus = map_corpus(p);
        const SmoothMap& map = corpus_map(corpus, "random_cubic");
        const auto a = p_tension(map, x, p);
        const auto b = p_tension_divergence_form(map, x, p);
        for (std::size_t c = 0; c < a.size(); ++c) CHECK(mixed_gap(a[c], b[c]) < 1e-10);
        const StressDivergence d = stress_divergence_check(map, x, p);
        CHECK(d.gap < 1e-9 * std::max(1.0, d.scale));
    }
}

}
