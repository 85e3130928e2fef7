#pragma once

#include "pbh/expr/expression.hpp"

#include <cstdint>
#include <random>

namespace pbh {

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/**
 * Random expression of depth <= max_depth over `dim` coordinates. Sub-expressions fed to
 * sqrt, log, pow and division are shifted by a positive constant plus a square, so every
 * draw is defined on all of R^dim; overflow is still possible and is left to the caller.
 */
Expression random_expression(std::mt19937_64& rng, int dim, int max_depth);

} // namespace pbh
