#pragma once

#include "pbh/scenarios/scenario.hpp"

#include <string>
#include <vector>

namespace pbh {

struct BuiltinInfo {
    std::string signature;
    std::string description;
};

std::vector<BuiltinInfo> builtin_catalog();

/// Accepts "inversion(n)", "proper_pbh_cylinder", "small_hypersphere(m, a)"; arguments may be
/// constant expressions such as 1/sqrt(2). Throws ConfigError for unknown names or bad arguments.
Scenario builtin(const std::string& name);

/// x -> x / |x|^l on R^n; p-harmonic exactly when l = (n + p - 2)/(p - 1).
Scenario inversion_scenario(int n);
/// (x1, x2, x3) -> (|(x1, x2)|, x3) from the conformal metric (x1^2 + x2^2)^(-1/p) delta.
Scenario proper_pbh_cylinder_scenario();
/// The sphere of radius a at height b = sqrt(1 - a^2) in the unit S^{m+1}, in stereographic charts.
Scenario small_hypersphere_scenario(int m, double a);

} // namespace pbh
