#pragma once

#include "pbh/submanifold/immersion.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pbh {

struct CorpusMap {
    std::string name;
    SmoothMap map;
    Box box;
};

struct CorpusImmersion {
    std::string name;
    Immersion immersion;
    Box box;
};

/// Maps with |dphi| bounded away from 0 on their boxes. Some source metrics depend on p.
std::vector<CorpusMap> map_corpus(double p);
/// Immersions into space-form charts: graphs over c = -1, 0, 1, a plane curve, a
/// codimension-2 surface, and small hyperspheres.
std::vector<CorpusImmersion> immersion_corpus();

/// R^2 -> R^2, identity plus a cubic with seeded coefficients of size <= 0.15.
SmoothMap random_cubic_map(std::uint64_t seed);

/// Seeded uniform points in a box.
std::vector<std::vector<double>> random_points(const Box& box, int count, std::uint64_t seed);

} // namespace pbh
