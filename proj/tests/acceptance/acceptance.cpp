// Acceptance runner: one line per criterion, nonzero exit if any selected criterion fails.
// Usage: acceptance [ID...]   (no arguments runs every criterion)

#include "pbh/scenarios/verification.hpp"

#include <fmt/core.h>

#include <set>
#include <string>

int main(int argc, char** argv) {
    std::set<std::string> wanted;
    for (int k = 1; k < argc; ++k) wanted.insert(argv[k]);

    int failures = 0;
    int selected = 0;
    for (const auto& criterion : pbh::acceptance_criteria()) {
        if (!wanted.empty() && wanted.count(criterion.id) == 0) continue;
        ++selected;
        const pbh::CriterionResult r = pbh::evaluate_criterion(criterion);
        fmt::print("{}\n", pbh::format_criterion(r));
        if (!r.pass) ++failures;
    }
    if (selected == 0) {
        fmt::print(stderr, "no criterion matched\n");
        return 2;
    }
    fmt::print("{}/{} criteria passed\n", selected - failures, selected);
    return failures == 0 ? 0 : 1;
}
