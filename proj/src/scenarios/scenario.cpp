#include "pbh/scenarios/scenario.hpp"

#include "pbh/expr/parser.hpp"
#include "pbh/expr/random_expression.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <random>
#include <sstream>

namespace pbh {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kSchema = "pbh/1";
// Rejection sampling gives up after this many draws per requested point.
constexpr int kMaxDrawsPerPoint = 1000;

constexpr std::array<std::pair<Check, const char*>, 8> kCheckNames{{
    {Check::PHarmonic, "p_harmonic"},
    {Check::PBiharmonic, "p_biharmonic"},
    {Check::Theorem21, "theorem_2_1"},
    {Check::Theorem23, "theorem_2_3"},
    {Check::CmcProperP, "cmc_proper_p"},
    {Check::StressDivergence, "stress_divergence"},
    {Check::TraceIdentity, "trace_identity"},
    {Check::EnergyQuadrature, "energy_quadrature"},
}};

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path.empty() ? key : path + "." + key, "missing required field");
    return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    return v.get<double>();
}

int integer(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<int>();
}

std::string string(const Json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> number_array(const Json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

ChartSpec parse_chart(const Json& obj, const std::string& path) {
    ChartSpec chart;
    chart.dim = integer(require(obj, "dim", path), join(path, "dim"));
    const std::string mpath = join(path, "metric");
    const Json& metric = require(obj, "metric", path);
    const std::string type = string(require(metric, "type", mpath), join(mpath, "type"));
    if (type == "euclidean") {
        chart.metric.type = MetricSpec::Type::Euclidean;
    } else if (type == "space_form") {
        chart.metric.type = MetricSpec::Type::SpaceForm;
        chart.metric.c = number(require(metric, "c", mpath), join(mpath, "c"));
    } else if (type == "conformal") {
        chart.metric.type = MetricSpec::Type::Conformal;
        chart.metric.factor = string(require(metric, "factor", mpath), join(mpath, "factor"));
    } else if (type == "components") {
        chart.metric.type = MetricSpec::Type::Components;
        const std::string gpath = join(mpath, "g");
        const Json& g = require(metric, "g", mpath);
        if (!g.is_array()) throw SchemaError(gpath, "expected an array of rows");
        for (std::size_t i = 0; i < g.size(); ++i) {
            const std::string rpath = gpath + "[" + std::to_string(i) + "]";
            if (!g[i].is_array()) throw SchemaError(rpath, "expected an array of expressions");
            std::vector<std::string> row;
            for (std::size_t j = 0; j < g[i].size(); ++j) row.push_back(string(g[i][j], rpath + "[" + std::to_string(j) + "]"));
            chart.metric.components.push_back(std::move(row));
        }
    } else if (type == "induced") {
        chart.metric.type = MetricSpec::Type::Induced;
    } else {
        throw SchemaError(join(mpath, "type"), "unknown metric type '" + type + "'");
    }
    return chart;
}

Json chart_to_json(const ChartSpec& chart) {
    Json metric;
    switch (chart.metric.type) {
    case MetricSpec::Type::Euclidean: metric["type"] = "euclidean"; break;
    case MetricSpec::Type::SpaceForm:
        metric["type"] = "space_form";
        metric["c"] = chart.metric.c;
        break;
    case MetricSpec::Type::Conformal:
        metric["type"] = "conformal";
        metric["factor"] = chart.metric.factor;
        break;
    case MetricSpec::Type::Components:
        metric["type"] = "components";
        metric["g"] = chart.metric.components;
        break;
    case MetricSpec::Type::Induced: metric["type"] = "induced"; break;
    }
    return Json{{"dim", chart.dim}, {"metric", metric}};
}

void check_expression(const std::string& text, int dim, const Parameters& params, const std::string& prefix,
                      const std::string& path) {
    try {
        (void)parse(text, dim, params.names, prefix);
    } catch (const ParseError& e) {
        throw SchemaError(path, e.what());
    }
}

void validate_chart(const ChartSpec& chart, const Parameters& params, const std::string& prefix, const std::string& path) {
    if (chart.dim < 1) throw SchemaError(join(path, "dim"), "dimension must be >= 1");
    const std::string mpath = join(path, "metric");
    switch (chart.metric.type) {
    case MetricSpec::Type::Conformal: check_expression(chart.metric.factor, chart.dim, params, prefix, join(mpath, "factor")); break;
    case MetricSpec::Type::Components: {
        const auto& g = chart.metric.components;
        const std::string gpath = join(mpath, "g");
        if (static_cast<int>(g.size()) != chart.dim) throw SchemaError(gpath, "expected " + std::to_string(chart.dim) + " rows");
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (static_cast<int>(g[i].size()) != chart.dim)
                throw SchemaError(gpath + "[" + std::to_string(i) + "]", "expected " + std::to_string(chart.dim) + " entries");
            for (std::size_t j = 0; j < g[i].size(); ++j)
                check_expression(g[i][j], chart.dim, params, prefix, gpath + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        }
        break;
    }
    default: break;
    }
}

} // namespace

std::string to_string(Check check) {
    for (const auto& [c, name] : kCheckNames)
        if (c == check) return name;
    return "unknown";
}

std::optional<Check> check_from_string(const std::string& name) {
    for (const auto& [c, n] : kCheckNames)
        if (name == n) return c;
    return std::nullopt;
}

Scenario parse_scenario(const std::string& json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw SchemaError("<document>", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("<document>", "expected a JSON object");
    const std::string schema = string(require(doc, "schema", ""), "schema");
    if (schema != kSchema) throw SchemaError("schema", "unsupported schema '" + schema + "', expected '" + kSchema + "'");

    Scenario s;
    s.name = string(require(doc, "name", ""), "name");
    const std::string kind = string(require(doc, "kind", ""), "kind");
    if (kind == "map")
        s.kind = ScenarioKind::Map;
    else if (kind == "immersion")
        s.kind = ScenarioKind::Immersion;
    else
        throw SchemaError("kind", "expected 'map' or 'immersion'");

    const Json& params = require(doc, "parameters", "");
    if (!params.is_object()) throw SchemaError("parameters", "expected an object of name: number");
    for (const auto& [name, value] : params.items()) s.parameters.set(name, number(value, "parameters." + name));

    if (doc.contains("sweep")) {
        const Json& sw = doc["sweep"];
        SweepSpec spec;
        spec.param = string(require(sw, "param", "sweep"), "sweep.param");
        spec.from = number(require(sw, "from", "sweep"), "sweep.from");
        spec.to = number(require(sw, "to", "sweep"), "sweep.to");
        spec.steps = integer(require(sw, "steps", "sweep"), "sweep.steps");
        s.sweep = spec;
    }

    s.source = parse_chart(require(doc, "source", ""), "source");
    s.target = parse_chart(require(doc, "target", ""), "target");

    const Json& comps = require(doc, "components", "");
    if (!comps.is_array()) throw SchemaError("components", "expected an array of expressions");
    for (std::size_t i = 0; i < comps.size(); ++i) s.components.push_back(string(comps[i], "components[" + std::to_string(i) + "]"));

    const Json& samples = require(doc, "samples", "");
    const Json& box = require(samples, "box", "samples");
    s.samples.box.lower = number_array(require(box, "lower", "samples.box"), "samples.box.lower");
    s.samples.box.upper = number_array(require(box, "upper", "samples.box"), "samples.box.upper");
    if (samples.contains("points_per_axis"))
        s.samples.points_per_axis = integer(samples["points_per_axis"], "samples.points_per_axis");
    if (samples.contains("random")) {
        const Json& r = samples["random"];
        s.samples.random_count = integer(require(r, "count", "samples.random"), "samples.random.count");
        const Json& seed = require(r, "seed", "samples.random");
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
            throw SchemaError("samples.random.seed", "expected a non-negative integer");
        s.samples.seed = seed.get<std::uint64_t>();
    }
    if (samples.contains("exclusions")) {
        const Json& ex = samples["exclusions"];
        if (!ex.is_array()) throw SchemaError("samples.exclusions", "expected an array");
        for (std::size_t i = 0; i < ex.size(); ++i) {
            const std::string path = "samples.exclusions[" + std::to_string(i) + "]";
            s.samples.exclusions.push_back(
                {string(require(ex[i], "expr", path), path + ".expr"), number(require(ex[i], "less_than", path), path + ".less_than")});
        }
    }

    const Json& checks = require(doc, "checks", "");
    if (!checks.is_array()) throw SchemaError("checks", "expected an array of check names");
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const std::string path = "checks[" + std::to_string(i) + "]";
        const std::string name = string(checks[i], path);
        const auto c = check_from_string(name);
        if (!c) throw SchemaError(path, "unknown check '" + name + "'");
        s.checks.push_back(*c);
    }
    if (doc.contains("tolerance")) s.tolerance = number(doc["tolerance"], "tolerance");

    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("<file>", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    Json doc;
    doc["schema"] = kSchema;
    doc["name"] = s.name;
    doc["kind"] = s.kind == ScenarioKind::Map ? "map" : "immersion";
    Json params = Json::object();
    for (std::size_t i = 0; i < s.parameters.names.size(); ++i) params[s.parameters.names[i]] = s.parameters.values[i];
    doc["parameters"] = params;
    if (s.sweep) doc["sweep"] = Json{{"param", s.sweep->param}, {"from", s.sweep->from}, {"to", s.sweep->to}, {"steps", s.sweep->steps}};
    doc["source"] = chart_to_json(s.source);
    doc["target"] = chart_to_json(s.target);
    doc["components"] = s.components;
    Json samples;
    samples["box"] = Json{{"lower", s.samples.box.lower}, {"upper", s.samples.box.upper}};
    if (s.samples.points_per_axis > 0) samples["points_per_axis"] = s.samples.points_per_axis;
    if (s.samples.random_count > 0) samples["random"] = Json{{"count", s.samples.random_count}, {"seed", s.samples.seed}};
    Json ex = Json::array();
    for (const auto& e : s.samples.exclusions) ex.push_back(Json{{"expr", e.expr}, {"less_than", e.less_than}});
    samples["exclusions"] = ex;
    doc["samples"] = samples;
    Json checks = Json::array();
    for (Check c : s.checks) checks.push_back(to_string(c));
    doc["checks"] = checks;
    doc["tolerance"] = s.tolerance;
    return doc.dump(2) + "\n";
}

void validate(const Scenario& s) {
    if (s.name.empty()) throw SchemaError("name", "must not be empty");
    if (s.parameters.index_of("p") < 0) throw SchemaError("parameters.p", "the exponent p must be bound");
    if (s.parameters.get("p") < 2.0 && s.kind == ScenarioKind::Map)
        throw SchemaError("parameters.p", "p must be >= 2 for maps");
    for (std::size_t i = 0; i < s.parameters.names.size(); ++i) {
        const auto& name = s.parameters.names[i];
        if (name.empty() || name == "pi" || (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y') &&
                                             name.find_first_not_of("0123456789", 1) == std::string::npos))
            throw SchemaError("parameters." + name, "parameter name collides with a reserved identifier");
    }
    if (s.sweep) {
        if (s.parameters.index_of(s.sweep->param) < 0) throw SchemaError("sweep.param", "unknown parameter '" + s.sweep->param + "'");
        if (s.sweep->steps < 2) throw SchemaError("sweep.steps", "must be >= 2");
    }

    validate_chart(s.source, s.parameters, "x", "source");
    validate_chart(s.target, s.parameters, "y", "target");
    if (s.kind == ScenarioKind::Immersion) {
        if (s.source.metric.type != MetricSpec::Type::Induced)
            throw SchemaError("source.metric.type", "immersions use the induced metric");
        if (s.source.dim > s.target.dim) throw SchemaError("source.dim", "immersion source dimension exceeds the ambient dimension");
    } else if (s.source.metric.type == MetricSpec::Type::Induced) {
        throw SchemaError("source.metric.type", "'induced' is only valid for immersions");
    }
    if (s.target.metric.type == MetricSpec::Type::Induced) throw SchemaError("target.metric.type", "'induced' is not a target metric");

    if (static_cast<int>(s.components.size()) != s.target.dim)
        throw SchemaError("components", "expected " + std::to_string(s.target.dim) + " components (target dimension)");
    for (std::size_t i = 0; i < s.components.size(); ++i)
        check_expression(s.components[i], s.source.dim, s.parameters, "x", "components[" + std::to_string(i) + "]");

    const auto& box = s.samples.box;
    if (box.dim() != s.source.dim) throw SchemaError("samples.box.lower", "expected " + std::to_string(s.source.dim) + " bounds");
    if (static_cast<int>(box.upper.size()) != s.source.dim)
        throw SchemaError("samples.box.upper", "expected " + std::to_string(s.source.dim) + " bounds");
    for (int i = 0; i < box.dim(); ++i)
        if (!(box.lower[static_cast<std::size_t>(i)] <= box.upper[static_cast<std::size_t>(i)]))
            throw SchemaError("samples.box", "lower bound exceeds upper bound on axis " + std::to_string(i + 1));
    if ((s.samples.points_per_axis > 0) == (s.samples.random_count > 0))
        throw SchemaError("samples", "give exactly one of 'points_per_axis' or 'random'");
    if (s.samples.points_per_axis < 0) throw SchemaError("samples.points_per_axis", "must be positive");
    if (s.samples.random_count < 0) throw SchemaError("samples.random.count", "must be positive");
    for (std::size_t i = 0; i < s.samples.exclusions.size(); ++i)
        check_expression(s.samples.exclusions[i].expr, s.source.dim, s.parameters, "x",
                         "samples.exclusions[" + std::to_string(i) + "].expr");

    if (s.checks.empty()) throw SchemaError("checks", "at least one check is required");
    for (std::size_t i = 0; i < s.checks.size(); ++i) {
        const Check c = s.checks[i];
        const std::string path = "checks[" + std::to_string(i) + "]";
        const bool submanifold = c == Check::Theorem21 || c == Check::Theorem23 || c == Check::CmcProperP;
        if (submanifold && s.kind != ScenarioKind::Immersion) throw SchemaError(path, "'" + to_string(c) + "' needs kind 'immersion'");
        if (submanifold && s.target.metric.type != MetricSpec::Type::SpaceForm)
            throw SchemaError(path, "'" + to_string(c) + "' needs a space_form target");
        if ((c == Check::Theorem23 || c == Check::CmcProperP) && s.target.dim != s.source.dim + 1)
            throw SchemaError(path, "'" + to_string(c) + "' needs a hypersurface");
    }
    if (!(s.tolerance > 0.0)) throw SchemaError("tolerance", "must be positive");
}

std::vector<std::vector<double>> sample_points(const Scenario& s) {
    const int d = s.source.dim;
    std::vector<Expression> exclusions;
    for (const auto& e : s.samples.exclusions) exclusions.push_back(parse(e.expr, d, s.parameters.names));
    auto excluded = [&](const std::vector<double>& x) {
        for (std::size_t i = 0; i < exclusions.size(); ++i) {
            double v = 0.0;
            try {
                v = exclusions[i].evaluate(x, s.parameters.values);
            } catch (const DomainError&) {
                return true;
            }
            if (v < s.samples.exclusions[i].less_than) return true;
        }
        return false;
    };

    const auto& box = s.samples.box;
    std::vector<std::vector<double>> points;
    if (s.samples.points_per_axis > 0) {
        const int n = s.samples.points_per_axis;
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        while (true) {
            std::vector<double> x(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                const double t = n == 1 ? 0.5 : static_cast<double>(idx[ku]) / (n - 1);
                x[ku] = box.lower[ku] + t * (box.upper[ku] - box.lower[ku]);
            }
            if (!excluded(x)) points.push_back(std::move(x));
            int k = d - 1;
            while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k--)] = 0;
            if (k < 0) break;
        }
    } else {
        std::mt19937_64 rng(s.samples.seed);
        const long long max_draws = static_cast<long long>(s.samples.random_count) * kMaxDrawsPerPoint;
        long long draws = 0;
        while (static_cast<int>(points.size()) < s.samples.random_count) {
            if (++draws > max_draws) throw SchemaError("samples.exclusions", "exclusions reject nearly the whole sample box");
            std::vector<double> x(static_cast<std::size_t>(d));
            for (int k = 0; k < d; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                x[ku] = box.lower[ku] + unit_uniform(rng()) * (box.upper[ku] - box.lower[ku]);
            }
            if (!excluded(x)) points.push_back(std::move(x));
        }
    }
    return points;
}

} // namespace pbh
