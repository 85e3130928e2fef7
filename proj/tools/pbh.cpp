// Command-line front end: built-in catalog, scenario runs, parameter sweeps, acceptance suite.

#include "pbh/scenarios/builtins.hpp"
#include "pbh/scenarios/runner.hpp"
#include "pbh/scenarios/verification.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

enum ExitCode { kPass = 0, kFail = 1, kInputError = 2, kStrictSingularity = 3 };

struct ReportFlags {
    std::optional<double> p;
    std::vector<std::string> sets;
    std::optional<double> tol;
    std::string out;
    std::string format = "csv";
    bool strict = false;
    int jobs = 1;
};

void add_report_flags(CLI::App* cmd, ReportFlags& f) {
    cmd->add_option("--p", f.p, "Override the exponent p");
    cmd->add_option("--set", f.sets, "Override a parameter, name=value (repeatable)");
    cmd->add_option("--tol", f.tol, "Residual tolerance");
    cmd->add_option("--out", f.out, "Write the report to this path instead of stdout");
    cmd->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--strict", f.strict, "Abort with exit code 3 on the first singular evaluation");
    cmd->add_option("--jobs", f.jobs, "Worker threads per parameter value")->check(CLI::PositiveNumber);
}

pbh::Scenario load(const std::string& ref) {
    constexpr std::string_view prefix = "builtin:";
    if (ref.rfind(prefix, 0) == 0) return pbh::builtin(ref.substr(prefix.size()));
    return pbh::load_scenario(ref);
}

pbh::Overrides overrides_from(const ReportFlags& f) {
    pbh::Overrides o;
    if (f.p) o.emplace_back("p", *f.p);
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw pbh::SchemaError("--set", "expected name=value, got '" + s + "'");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s.substr(eq + 1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() - eq - 1) throw pbh::SchemaError("--set", "value of '" + s + "' is not a number");
        o.emplace_back(s.substr(0, eq), v);
    }
    return o;
}

pbh::RunOptions options_from(const ReportFlags& f) {
    pbh::RunOptions o;
    o.tolerance = f.tol;
    o.strict = f.strict;
    o.jobs = f.jobs;
    return o;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pbh::SchemaError("--out", "cannot write '" + path + "'");
    out << text;
}

void print_summary(const pbh::ResidualReport& r) {
    std::cout << fmt::format("scenario {}: {}\n", r.scenario, r.verdict() ? "pass" : "fail");
    for (const auto& [check, value] : r.summary()) std::cout << fmt::format("  {:<18} max residual {:.3e}\n", check, value);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pbh: verification engine for p-harmonic, p-biharmonic and stress p-bienergy identities"};
    app.require_subcommand(1);

    auto* builtin_cmd = app.add_subcommand("builtin", "Built-in scenarios");
    builtin_cmd->require_subcommand(1);
    builtin_cmd->add_subcommand("list", "List built-in scenarios");
    auto* show = builtin_cmd->add_subcommand("show", "Print a built-in scenario as JSON");
    std::string show_name;
    show->add_option("name", show_name, "Builtin name, e.g. small_hypersphere(2,0.8)")->required();

    ReportFlags run_flags;
    std::string run_ref;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario file (or builtin:NAME)");
    run_cmd->add_option("scenario", run_ref, "Scenario JSON path or builtin:NAME")->required();
    add_report_flags(run_cmd, run_flags);

    ReportFlags sweep_flags;
    std::string sweep_ref;
    pbh::SweepSpec spec;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one parameter and report zero crossings");
    sweep_cmd->add_option("scenario", sweep_ref, "Scenario JSON path or builtin:NAME")->required();
    sweep_cmd->add_option("--param", spec.param, "Parameter to sweep")->required();
    sweep_cmd->add_option("--from", spec.from, "First value")->required();
    sweep_cmd->add_option("--to", spec.to, "Last value")->required();
    sweep_cmd->add_option("--steps", spec.steps, "Number of values, ends included")->required();
    add_report_flags(sweep_cmd, sweep_flags);

    auto* verify_cmd = app.add_subcommand("verify-paper", "Run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInputError;
    }

    try {
        if (builtin_cmd->parsed()) {
            if (show->parsed()) {
                std::cout << pbh::scenario_to_json(pbh::builtin(show_name));
                return kPass;
            }
            for (const auto& b : pbh::builtin_catalog()) std::cout << fmt::format("{:<26} {}\n", b.signature, b.description);
            return kPass;
        }
        if (run_cmd->parsed()) {
            const auto report = pbh::run(load(run_ref), overrides_from(run_flags), options_from(run_flags));
            emit(run_flags.format == "json" ? pbh::to_json(report) : pbh::to_csv(report), run_flags.out);
            if (!run_flags.out.empty()) print_summary(report);
            return report.verdict() ? kPass : kFail;
        }
        if (sweep_cmd->parsed()) {
            const auto result = pbh::sweep(load(sweep_ref), spec, overrides_from(sweep_flags), options_from(sweep_flags));
            emit(sweep_flags.format == "json" ? pbh::to_json(result) : pbh::to_csv(result.report), sweep_flags.out);
            if (!sweep_flags.out.empty() || sweep_flags.format == "csv") {
                auto& os = sweep_flags.out.empty() ? std::cerr : std::cout;
                for (const auto& z : result.crossings)
                    os << fmt::format("zero crossing of {} in [{}, {}] at {} = {}\n", z.check, z.lower, z.upper, result.param, z.estimate);
            }
            return result.report.verdict() ? kPass : kFail;
        }
        if (verify_cmd->parsed()) {
            const auto results = pbh::verify_paper();
            bool all = true;
            for (const auto& r : results) {
                std::cout << pbh::format_criterion(r) << "\n";
                all = all && r.pass;
            }
            return all ? kPass : kFail;
        }
    } catch (const pbh::SingularityError& e) {
        std::cerr << "singularity: " << e.what() << "\n";
        return kStrictSingularity;
    } catch (const pbh::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kInputError;
    } catch (const pbh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kPass;
}
