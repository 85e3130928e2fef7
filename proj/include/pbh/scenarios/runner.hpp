#pragma once

#include "pbh/scenarios/scenario.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pbh {

struct ReportRow {
    std::string check;
    double p = 0.0;
    std::vector<double> params; // every bound parameter except p, in scenario order
    int point_index = -1;       // -1 for box-level checks
    std::vector<double> point;
    double residual = 0.0;
    bool pass = false;
    std::optional<double> signed_value; // signed scalar part, where the check has one
    std::string note;
};

struct ResidualReport {
    std::string scenario;
    std::vector<std::string> param_names; // every parameter except p
    int point_dim = 0;
    double tolerance = 0.0;
    std::vector<ReportRow> rows;

    bool verdict() const;
    /// Max residual per check, in first-appearance order.
    std::vector<std::pair<std::string, double>> summary() const;
};

struct RunOptions {
    std::optional<double> tolerance;
    bool strict = false; // abort on the first singular evaluation
    int jobs = 1;
};

using Overrides = std::vector<std::pair<std::string, double>>;

/// Applies overrides to a copy of the scenario and revalidates it.
Scenario with_overrides(const Scenario& scenario, const Overrides& overrides);

/// Rows ordered by point index then check; box-level checks follow the points.
ResidualReport run(const Scenario& scenario, const Overrides& overrides = {}, const RunOptions& options = {});

struct ZeroCrossing {
    std::string check;
    double lower = 0.0;
    double upper = 0.0;
    double estimate = 0.0; // linear interpolation of the signed residual
};

struct SweepReport {
    ResidualReport report;
    std::string param;
    std::vector<double> values;
    std::vector<ZeroCrossing> crossings;
};

/// `steps` equally spaced values including both ends; crossings use sample point 0.
SweepReport sweep(const Scenario& scenario, const SweepSpec& spec, const Overrides& overrides = {},
                  const RunOptions& options = {});

std::vector<ZeroCrossing> zero_crossings(const std::string& check, const std::vector<double>& values,
                                         const std::vector<double>& signed_values, double tolerance);

std::string to_csv(const ResidualReport& report);
std::string to_json(const ResidualReport& report);
std::string to_json(const SweepReport& report);

} // namespace pbh
