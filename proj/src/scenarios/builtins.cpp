#include "pbh/scenarios/builtins.hpp"

#include "pbh/expr/parser.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pbh {
namespace {

std::string sum_of_squares(int n) {
    std::string s;
    for (int i = 1; i <= n; ++i) s += fmt::format("{}x{}^2", i > 1 ? "+" : "", i);
    return s;
}

std::vector<double> constant_arguments(const std::string& name, const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i < text.size() && text[i] == '(') ++depth;
        if (i < text.size() && text[i] == ')') --depth;
        if (i == text.size() || (text[i] == ',' && depth == 0)) {
            const std::string arg = text.substr(start, i - start);
            try {
                out.push_back(parse(arg, 0).evaluate(std::span<const double>{}, std::span<const double>{}));
            } catch (const Error& e) {
                throw ConfigError("builtin '" + name + "': bad argument '" + arg + "': " + e.what());
            }
            start = i + 1;
        }
    }
    return out;
}

int integer_argument(const std::string& name, double v) {
    if (v != std::floor(v) || v < 1 || v > 4) throw ConfigError("builtin '" + name + "': dimension must be an integer in [1, 4]");
    return static_cast<int>(v);
}

} // namespace

std::vector<BuiltinInfo> builtin_catalog() {
    return {
        {"inversion(n)", "x -> x/|x|^l on R^n, p-harmonic iff l = (n+p-2)/(p-1); sweeps l over [1.5, 3]"},
        {"proper_pbh_cylinder", "(x1,x2,x3) -> (|(x1,x2)|, x3) with g = (x1^2+x2^2)^(-1/p) delta; proper p-biharmonic"},
        {"small_hypersphere(m, a)", "S^m(a) in S^{m+1}, 0 < a < 1; proper p-biharmonic iff p = 1/(1-a^2); sweeps p over [2, 6]"},
    };
}

Scenario inversion_scenario(int n) {
    if (n < 2 || n > 4) throw ConfigError("inversion(n) needs 2 <= n <= 4");
    Scenario s;
    s.name = fmt::format("inversion({})", n);
    s.kind = ScenarioKind::Map;
    const double p = 3.0;
    s.parameters.set("p", p);
    s.parameters.set("l", (n + p - 2.0) / (p - 1.0));
    s.sweep = SweepSpec{"l", 1.5, 3.0, 16};
    s.source = {n, {}};
    s.target = {n, {}};
    for (int i = 1; i <= n; ++i) s.components.push_back(fmt::format("x{}/({})^(l/2)", i, sum_of_squares(n)));
    s.samples.box = {std::vector<double>(static_cast<std::size_t>(n), 0.5), std::vector<double>(static_cast<std::size_t>(n), 2.0)};
    s.samples.random_count = 10;
    s.samples.seed = 11;
    s.samples.exclusions.push_back({fmt::format("sqrt({})", sum_of_squares(n)), 0.1});
    s.checks = {Check::PHarmonic, Check::PBiharmonic, Check::StressDivergence, Check::TraceIdentity};
    validate(s);
    return s;
}

Scenario proper_pbh_cylinder_scenario() {
    Scenario s;
    s.name = "proper_pbh_cylinder";
    s.kind = ScenarioKind::Map;
    s.parameters.set("p", 3.0);
    s.source = {3, {MetricSpec::Type::Conformal, 0.0, "(x1^2+x2^2)^(-1/p)", {}}};
    s.target = {2, {}};
    s.components = {"sqrt(x1^2+x2^2)", "x3"};
    s.samples.box = {{0.5, 0.5, 0.5}, {2.0, 2.0, 2.0}};
    s.samples.random_count = 10;
    s.samples.seed = 12;
    s.samples.exclusions.push_back({"sqrt(x1^2+x2^2)", 0.1});
    s.checks = {Check::PBiharmonic, Check::StressDivergence, Check::TraceIdentity, Check::EnergyQuadrature};
    validate(s);
    return s;
}

Scenario small_hypersphere_scenario(int m, double a) {
    if (m < 1 || m > 3) throw ConfigError("small_hypersphere(m, a) needs 1 <= m <= 3");
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("small_hypersphere(m, a) needs 0 < a < 1");
    Scenario s;
    s.name = fmt::format("small_hypersphere({}, {})", m, a);
    s.kind = ScenarioKind::Immersion;
    s.parameters.set("p", 1.0 / (1.0 - a * a));
    s.parameters.set("a", a);
    s.sweep = SweepSpec{"p", 2.0, 6.0, 41};
    s.source = {m, {MetricSpec::Type::Induced, 0.0, {}, {}}};
    s.target = {m + 1, {MetricSpec::Type::SpaceForm, 1.0, {}, {}}};
    // Inverse stereographic map of the unit S^m scaled by a, then the stereographic chart of
    // S^{m+1} from its north pole: y = 2 a w / (1 - b).
    const std::string scale = "(2*a/(1-sqrt(1-a^2)))";
    const std::string s2 = sum_of_squares(m);
    for (int i = 1; i <= m; ++i) s.components.push_back(fmt::format("{}*2*x{}/(1+{})", scale, i, s2));
    s.components.push_back(fmt::format("{}*({}-1)/(1+{})", scale, s2, s2));
    s.samples.box = {std::vector<double>(static_cast<std::size_t>(m), -1.0), std::vector<double>(static_cast<std::size_t>(m), 1.0)};
    s.samples.points_per_axis = 3;
    s.checks = {Check::Theorem21, Check::Theorem23, Check::CmcProperP, Check::PBiharmonic};
    validate(s);
    return s;
}

Scenario builtin(const std::string& name) {
    const auto open = name.find('(');
    const std::string head = name.substr(0, open);
    std::vector<double> args;
    if (open != std::string::npos) {
        if (name.back() != ')') throw ConfigError("builtin '" + name + "': missing ')'");
        args = constant_arguments(name, name.substr(open + 1, name.size() - open - 2));
    }
    if (head == "inversion") {
        if (args.size() > 1) throw ConfigError("inversion takes one argument n");
        return inversion_scenario(args.empty() ? 3 : integer_argument(name, args[0]));
    }
    if (head == "proper_pbh_cylinder") {
        if (!args.empty()) throw ConfigError("proper_pbh_cylinder takes no arguments");
        return proper_pbh_cylinder_scenario();
    }
    if (head == "small_hypersphere") {
        if (args.size() != 2) throw ConfigError("small_hypersphere takes two arguments (m, a)");
        return small_hypersphere_scenario(integer_argument(name, args[0]), args[1]);
    }
    throw ConfigError("unknown builtin '" + name + "'");
}

} // namespace pbh
