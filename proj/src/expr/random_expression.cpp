#include "pbh/expr/random_expression.hpp"

#include <algorithm>
#include <cmath>

namespace pbh {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng()); }

int pick(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

/// c + u^2 with c in [0.5, 1.5]: strictly positive everywhere.
Expression positive(std::mt19937_64& rng, const Expression& u) { return uniform(rng, 0.5, 1.5) + u * u; }

Expression leaf(std::mt19937_64& rng, int dim) {
    if (pick(rng, 3) == 0) return Expression::constant(std::round(uniform(rng, -2.0, 2.0) * 8.0) / 8.0);
    return Expression::coordinate(pick(rng, dim));
}

} // namespace

Expression random_expression(std::mt19937_64& rng, int dim, int max_depth) {
    if (max_depth <= 1) return leaf(rng, dim);
    const int depth = max_depth - 1;
    // positive() adds two levels above its argument.
    const int inner = std::max(1, max_depth - 3);
    if (max_depth < 4) {
        switch (pick(rng, 4)) {
        case 0: return random_expression(rng, dim, depth) + random_expression(rng, dim, depth);
        case 1: return random_expression(rng, dim, depth) * random_expression(rng, dim, depth);
        case 2: return sin(random_expression(rng, dim, depth));
        default: return cos(random_expression(rng, dim, depth));
        }
    }
    switch (pick(rng, 12)) {
    case 0: return random_expression(rng, dim, depth) + random_expression(rng, dim, depth);
    case 1: return random_expression(rng, dim, depth) - random_expression(rng, dim, depth);
    case 2:
    case 3: return random_expression(rng, dim, depth) * random_expression(rng, dim, depth);
    case 4: return random_expression(rng, dim, depth) / positive(rng, random_expression(rng, dim, inner));
    case 5: return sqrt(positive(rng, random_expression(rng, dim, inner)));
    case 6: return log(positive(rng, random_expression(rng, dim, inner)));
    case 7: return exp(sin(random_expression(rng, dim, max_depth - 2)));
    case 8: return sin(random_expression(rng, dim, depth));
    case 9: return cos(random_expression(rng, dim, depth));
    case 10: return pow(positive(rng, random_expression(rng, dim, inner)), std::round(uniform(rng, -2.5, 2.5) * 4.0) / 4.0);
    default: return -random_expression(rng, dim, depth);
    }
}

} // namespace pbh
