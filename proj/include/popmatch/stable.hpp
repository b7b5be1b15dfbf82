#pragma once

#include <optional>
#include <vector>

#include "popmatch/core.hpp"

namespace popmatch::stable {

// Proposing-side-optimal stable matching. Bipartite only.
Matching gale_shapley(const Instance& inst, Side proposing);

// Stable roommates with incomplete lists; nullopt iff no stable matching exists.
std::optional<Matching> irving(const Instance& inst);

// Every stable matching of a bipartite instance, in canonical edge-set order.
std::vector<Matching> enumerate_stable(const Instance& inst, std::size_t cap = 100000);

// Maximum total cost over enumerate_stable; ties go to the earlier matching.
Matching max_weight_stable(const Instance& inst, std::size_t cap = 100000);

}  // namespace popmatch::stable
