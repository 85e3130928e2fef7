#pragma once

#include "pbh/geometry/chart.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pbh {

enum class ScenarioKind { Map, Immersion };

enum class Check {
    PHarmonic,
    PBiharmonic,
    Theorem21,
    Theorem23,
    CmcProperP,
    StressDivergence,
    TraceIdentity,
    EnergyQuadrature,
};

std::string to_string(Check check);
std::optional<Check> check_from_string(const std::string& name);

struct MetricSpec {
    enum class Type { Euclidean, SpaceForm, Conformal, Components, Induced };
    Type type = Type::Euclidean;
    double c = 0.0;                                 // SpaceForm
    std::string factor;                             // Conformal
    std::vector<std::vector<std::string>> components; // Components
};

struct ChartSpec {
    int dim = 0;
    MetricSpec metric;
};

struct Exclusion {
    std::string expr;
    double less_than = 0.0;
};

struct SampleSpec {
    Box box;
    int points_per_axis = 0;
    int random_count = 0;
    std::uint64_t seed = 0;
    std::vector<Exclusion> exclusions;
};

struct SweepSpec {
    std::string param;
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
};

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Map;
    Parameters parameters; // always contains "p"
    std::optional<SweepSpec> sweep;
    ChartSpec source;
    ChartSpec target;
    std::vector<std::string> components;
    SampleSpec samples;
    std::vector<Check> checks;
    double tolerance = 1e-7;
};

/// Parses and validates a "pbh/1" scenario document; throws SchemaError naming the field.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

/// Re-runs every semantic check (expression parsing, dimensions, check/kind compatibility).
void validate(const Scenario& scenario);

/// Sample points in index order: grid points (last axis fastest) or seeded uniform draws,
/// skipping declared exclusions.
std::vector<std::vector<double>> sample_points(const Scenario& scenario);

} // namespace pbh
