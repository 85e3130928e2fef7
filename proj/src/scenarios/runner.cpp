#include "pbh/scenarios/runner.hpp"

#include "pbh/expr/parser.hpp"
#include "pbh/mapcalc/energy.hpp"
#include "pbh/stress/stress.hpp"
#include "pbh/submanifold/immersion.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace pbh {
namespace {

using Json = nlohmann::ordered_json;

// Gauss-Legendre orders compared by the energy_quadrature check.
constexpr int kQuadratureOrder = 8;
constexpr int kQuadratureReference = 16;

ChartMetric make_chart(const ChartSpec& spec, const Parameters& params, const char* prefix) {
    switch (spec.metric.type) {
    case MetricSpec::Type::Euclidean: return ChartMetric::euclidean(spec.dim);
    case MetricSpec::Type::SpaceForm: return space_form_chart(spec.metric.c, spec.dim);
    case MetricSpec::Type::Conformal:
        return ChartMetric::conformal(spec.dim, parse(spec.metric.factor, spec.dim, params.names, prefix), params);
    case MetricSpec::Type::Components: {
        std::vector<std::vector<Expression>> g;
        for (const auto& row : spec.metric.components) {
            std::vector<Expression> r;
            for (const auto& e : row) r.push_back(parse(e, spec.dim, params.names, prefix));
            g.push_back(std::move(r));
        }
        return ChartMetric(spec.dim, std::move(g), params);
    }
    case MetricSpec::Type::Induced: break;
    }
    throw ConfigError("the induced metric is built from the immersion, not from a chart spec");
}

/// Everything needed to evaluate checks for one parameter tuple.
struct Context {
    const Scenario* scenario = nullptr;
    double p = 0.0;
    std::optional<SmoothMap> map;
    std::optional<Immersion> immersion;
    bool constant_mean_curvature = true;

    const SmoothMap& smooth_map() const { return immersion ? immersion->map() : *map; }
};

Context make_context(const Scenario& s) {
    Context ctx;
    ctx.scenario = &s;
    ctx.p = s.parameters.get("p");
    std::vector<Expression> comps;
    for (const auto& c : s.components) comps.push_back(parse(c, s.source.dim, s.parameters.names));
    const ChartMetric target = make_chart(s.target, s.parameters, "y");
    if (s.kind == ScenarioKind::Immersion)
        ctx.immersion.emplace(target, std::move(comps), s.source.dim, s.parameters, s.samples.box);
    else
        ctx.map.emplace(make_chart(s.source, s.parameters, "x"), target, std::move(comps), s.parameters);
    return ctx;
}

struct Outcome {
    double residual = 0.0;
    std::optional<double> signed_value;
    std::string note;
    bool force_fail = false;
};

Outcome evaluate_point_check(const Context& ctx, Check check, std::span<const double> x) {
    const SmoothMap& map = ctx.smooth_map();
    const double p = ctx.p;
    Outcome out;
    switch (check) {
    case Check::PHarmonic: out.residual = target_norm(map, x, p_tension(map, x, p)); break;
    case Check::PBiharmonic: out.residual = target_norm(map, x, p_bitension(map, x, p)); break;
    case Check::Theorem21: {
        const auto r = theorem21_residuals(*ctx.immersion, x, p);
        out.residual = std::max(r.normal_norm, r.tangent_norm);
        const auto h = mean_curvature(*ctx.immersion, x);
        const double hn = std::sqrt(ambient_inner(*ctx.immersion, x, h, h));
        if (hn > 0.0) out.signed_value = ambient_inner(*ctx.immersion, x, r.normal, h) / hn;
        break;
    }
    case Check::Theorem23: {
        const auto r = theorem23_residuals(*ctx.immersion, x, p);
        out.residual = std::max(std::fabs(r.normal), r.tangent_norm);
        out.signed_value = r.normal;
        break;
    }
    case Check::CmcProperP: {
        const auto pp = cmc_proper_p(*ctx.immersion, x);
        out.residual = std::fabs(pp.p_star - p);
        out.signed_value = p - pp.p_star;
        out.note = fmt::format("p_star={}", pp.p_star);
        if (!pp.admissible) out.note += "; no admissible p >= 2";
        if (!ctx.constant_mean_curvature) {
            out.note += "; mean curvature not constant on the samples";
            out.force_fail = true;
        }
        break;
    }
    case Check::StressDivergence: {
        const auto d = stress_divergence_check(map, x, p);
        out.residual = d.gap / std::max(1.0, d.scale);
        break;
    }
    case Check::TraceIdentity: {
        const auto t = stress_trace_forms(map, x, p);
        out.residual = std::max(std::fabs(t.direct - t.inner_form), std::fabs(t.direct - t.theta_form));
        const int m = map.source_dim();
        if (p == static_cast<double>(m)) out.residual = std::max(out.residual, std::fabs(t.direct + 0.5 * m * t.tau_p_squared));
        break;
    }
    case Check::EnergyQuadrature: break;
    }
    return out;
}

Outcome evaluate_box_check(const Context& ctx) {
    const SmoothMap& map = ctx.smooth_map();
    const Box& box = ctx.scenario->samples.box;
    const double e8 = p_energy_box(map, box, ctx.p, kQuadratureOrder);
    const double e16 = p_energy_box(map, box, ctx.p, kQuadratureReference);
    const double b8 = p_bienergy_box(map, box, ctx.p, kQuadratureOrder);
    const double b16 = p_bienergy_box(map, box, ctx.p, kQuadratureReference);
    Outcome out;
    out.residual = std::max(std::fabs(e8 - e16) / std::max(1.0, std::fabs(e16)), std::fabs(b8 - b16) / std::max(1.0, std::fabs(b16)));
    out.note = fmt::format("E_p={}; E_2p={}", e16, b16);
    return out;
}

std::vector<double> non_p_params(const Scenario& s) {
    std::vector<double> out;
    for (std::size_t i = 0; i < s.parameters.names.size(); ++i)
        if (s.parameters.names[i] != "p") out.push_back(s.parameters.values[i]);
    return out;
}

ReportRow make_row(const Scenario& s, Check check, int index, std::span<const double> x, const Outcome& o, double tol) {
    ReportRow row;
    row.check = to_string(check);
    row.p = s.parameters.get("p");
    row.params = non_p_params(s);
    row.point_index = index;
    row.point.assign(x.begin(), x.end());
    row.residual = o.residual;
    row.pass = !o.force_fail && std::isfinite(o.residual) && o.residual < tol;
    row.signed_value = o.signed_value;
    row.note = o.note;
    return row;
}

std::string point_text(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) s += fmt::format("{}{}", i ? ", " : "", x[i]);
    return s + ")";
}

template <class F>
Outcome guarded(const F& f, bool strict, const std::string& where) {
    try {
        return f();
    } catch (const SingularityError& e) {
        if (strict) throw SingularityError(where + ": " + e.what());
        return {std::numeric_limits<double>::quiet_NaN(), std::nullopt, std::string("singular: ") + e.what(), true};
    } catch (const DomainError& e) {
        if (strict) throw SingularityError(where + ": " + e.what());
        return {std::numeric_limits<double>::quiet_NaN(), std::nullopt, std::string("domain: ") + e.what(), true};
    } catch (const DegenerateError& e) {
        if (strict) throw SingularityError(where + ": " + e.what());
        return {std::numeric_limits<double>::quiet_NaN(), std::nullopt, std::string("degenerate: ") + e.what(), true};
    }
}

std::string csv_number(double v) { return fmt::format("{}", v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

Json number_json(double v) {
    if (std::isfinite(v)) return v;
    return fmt::format("{}", v);
}

Json report_json(const ResidualReport& r) {
    Json doc;
    doc["schema"] = "pbh/1";
    doc["scenario"] = r.scenario;
    doc["tolerance"] = r.tolerance;
    doc["verdict"] = r.verdict() ? "pass" : "fail";
    Json summary = Json::object();
    for (const auto& [check, value] : r.summary()) summary[check] = number_json(value);
    doc["summary"] = summary;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json j;
        j["check"] = row.check;
        j["p"] = row.p;
        Json params = Json::object();
        for (std::size_t i = 0; i < r.param_names.size(); ++i) params[r.param_names[i]] = row.params[i];
        j["params"] = params;
        j["point_index"] = row.point_index;
        j["point"] = row.point;
        j["residual_norm"] = number_json(row.residual);
        j["pass"] = row.pass;
        if (row.signed_value) j["signed_residual"] = number_json(*row.signed_value);
        if (!row.note.empty()) j["note"] = row.note;
        rows.push_back(std::move(j));
    }
    doc["rows"] = rows;
    return doc;
}

} // namespace

bool ResidualReport::verdict() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

std::vector<std::pair<std::string, double>> ResidualReport::summary() const {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == row.check; });
        if (it == out.end()) {
            out.emplace_back(row.check, row.residual);
        } else if (std::isnan(row.residual)) {
            it->second = row.residual;
        } else if (!std::isnan(it->second) && row.residual > it->second) {
            it->second = row.residual;
        }
    }
    return out;
}

Scenario with_overrides(const Scenario& scenario, const Overrides& overrides) {
    Scenario s = scenario;
    for (const auto& [name, value] : overrides) {
        if (s.parameters.index_of(name) < 0) throw SchemaError("parameters." + name, "unknown parameter in override");
        s.parameters.set(name, value);
    }
    validate(s);
    return s;
}

ResidualReport run(const Scenario& scenario, const Overrides& overrides, const RunOptions& options) {
    const Scenario s = with_overrides(scenario, overrides);
    const double tol = options.tolerance.value_or(s.tolerance);
    const auto points = sample_points(s);

    ResidualReport report;
    report.scenario = s.name;
    for (const auto& name : s.parameters.names)
        if (name != "p") report.param_names.push_back(name);
    report.point_dim = s.source.dim;
    report.tolerance = tol;

    Context ctx = make_context(s);
    const bool wants_cmc = std::find(s.checks.begin(), s.checks.end(), Check::CmcProperP) != s.checks.end();
    if (wants_cmc) {
        try {
            ctx.constant_mean_curvature = has_constant_mean_curvature(*ctx.immersion, points);
        } catch (const Error&) {
            ctx.constant_mean_curvature = false;
        }
    }

    std::vector<Check> point_checks;
    bool box_check = false;
    for (Check c : s.checks) {
        if (c == Check::EnergyQuadrature)
            box_check = true;
        else
            point_checks.push_back(c);
    }

    // One slot per point; workers fill slots, assembly runs in index order.
    std::vector<std::vector<ReportRow>> slots(points.size());
    std::vector<std::exception_ptr> failures(points.size());
    auto work = [&](std::size_t i) {
        try {
            for (Check c : point_checks) {
                const std::string where = fmt::format("check '{}' at point {} {}", to_string(c), i, point_text(points[i]));
                const Outcome o = guarded([&] { return evaluate_point_check(ctx, c, points[i]); }, options.strict, where);
                slots[i].push_back(make_row(s, c, static_cast<int>(i), points[i], o, tol));
            }
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || points.size() < 2) {
        for (std::size_t i = 0; i < points.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min<int>(jobs, static_cast<int>(points.size())); ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < points.size(); i = next++) work(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    for (auto& slot : slots)
        for (auto& row : slot) report.rows.push_back(std::move(row));

    if (box_check) {
        const Outcome o = guarded([&] { return evaluate_box_check(ctx); }, options.strict, "check 'energy_quadrature' on the sample box");
        report.rows.push_back(make_row(s, Check::EnergyQuadrature, -1, {}, o, tol));
    }
    return report;
}

std::vector<ZeroCrossing> zero_crossings(const std::string& check, const std::vector<double>& values,
                                         const std::vector<double>& signed_values, double tolerance) {
    std::vector<ZeroCrossing> out;
    const std::size_t n = std::min(values.size(), signed_values.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double si = signed_values[i];
        if (std::fabs(si) <= tolerance) {
            out.push_back({check, values[i], values[i], values[i]});
            continue;
        }
        if (i + 1 >= n) break;
        const double sj = signed_values[i + 1];
        if (std::fabs(sj) <= tolerance) continue;
        if ((si < 0.0) != (sj < 0.0)) {
            const double t = si / (si - sj);
            out.push_back({check, values[i], values[i + 1], values[i] + t * (values[i + 1] - values[i])});
        }
    }
    return out;
}

SweepReport sweep(const Scenario& scenario, const SweepSpec& spec, const Overrides& overrides, const RunOptions& options) {
    if (scenario.parameters.index_of(spec.param) < 0) throw SchemaError("sweep.param", "unknown parameter '" + spec.param + "'");
    if (spec.steps < 2) throw SchemaError("sweep.steps", "must be >= 2");
    SweepReport out;
    out.param = spec.param;
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (int i = 0; i < spec.steps; ++i) {
        const double v = spec.from + (spec.to - spec.from) * static_cast<double>(i) / (spec.steps - 1);
        out.values.push_back(v);
        Overrides o = overrides;
        o.emplace_back(spec.param, v);
        ResidualReport r = run(scenario, o, options);
        if (i == 0) {
            out.report.scenario = r.scenario;
            out.report.param_names = r.param_names;
            out.report.point_dim = r.point_dim;
            out.report.tolerance = r.tolerance;
        }
        for (auto& row : r.rows) {
            if (row.point_index == 0 && row.signed_value) {
                auto it = std::find_if(series.begin(), series.end(), [&](const auto& e) { return e.first == row.check; });
                if (it == series.end()) {
                    series.emplace_back(row.check, std::vector<double>{});
                    it = series.end() - 1;
                }
                it->second.push_back(*row.signed_value);
            }
            out.report.rows.push_back(std::move(row));
        }
    }
    for (const auto& [check, values] : series)
        if (values.size() == out.values.size()) {
            auto z = zero_crossings(check, out.values, values, out.report.tolerance);
            out.crossings.insert(out.crossings.end(), z.begin(), z.end());
        }
    return out;
}

std::string to_csv(const ResidualReport& r) {
    std::string out = "scenario,check,p";
    for (const auto& name : r.param_names) out += "," + csv_field(name);
    for (int i = 0; i < r.point_dim; ++i) out += fmt::format(",x{}", i + 1);
    out += ",residual_norm,pass\n";
    for (const auto& row : r.rows) {
        out += csv_field(r.scenario) + "," + row.check + "," + csv_number(row.p);
        for (double v : row.params) out += "," + csv_number(v);
        for (int i = 0; i < r.point_dim; ++i)
            out += "," + (static_cast<std::size_t>(i) < row.point.size() ? csv_number(row.point[static_cast<std::size_t>(i)]) : std::string());
        out += "," + csv_number(row.residual) + "," + (row.pass ? "true" : "false") + "\n";
    }
    return out;
}

std::string to_json(const ResidualReport& report) { return report_json(report).dump(2) + "\n"; }

std::string to_json(const SweepReport& sweep_report) {
    Json doc = report_json(sweep_report.report);
    Json sw;
    sw["param"] = sweep_report.param;
    sw["values"] = sweep_report.values;
    Json crossings = Json::array();
    for (const auto& z : sweep_report.crossings)
        crossings.push_back(Json{{"check", z.check}, {"lower", z.lower}, {"upper", z.upper}, {"estimate", z.estimate}});
    sw["zero_crossings"] = crossings;
    doc["sweep"] = sw;
    return doc.dump(2) + "\n";
}

} // namespace pbh
