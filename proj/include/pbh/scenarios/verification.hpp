#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pbh {

struct CriterionResult {
    std::string id;
    std::string title;
    bool pass = false;
    std::string detail;
};

/// One named acceptance check of the library against the closed-form geometry it implements.
struct Criterion {
    std::string id;
    std::string title;
    std::function<CriterionResult()> evaluate;
};

const std::vector<Criterion>& acceptance_criteria();

/// Evaluates every criterion in id order; exceptions become failing results.
std::vector<CriterionResult> verify_paper();
CriterionResult evaluate_criterion(const Criterion& criterion);

/// "[PASS] 3  title: detail"
std::string format_criterion(const CriterionResult& result);

} // namespace pbh
