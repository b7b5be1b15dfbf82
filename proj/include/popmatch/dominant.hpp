#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "popmatch/core.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/verify.hpp"

namespace popmatch::dominant {

// Roommates instance on u+, u-, u$d for every base node u (in that order).
struct BidirectedInstance {
  Instance graph;
  int base_size = 0;
  int plus(int u) const { return 3 * u; }
  int minus(int u) const { return 3 * u + 1; }
  int dummy(int u) const { return 3 * u + 2; }
};

BidirectedInstance build_bidirected(const Instance& inst);

// Strongly dominant matching with its unit witness, or nullopt if none exists.
std::optional<std::pair<Matching, Witness>> strongly_dominant(const Instance& inst);

struct EdgeSets {
  std::vector<int> stable, dominant, popular;             // e in some such matching
  std::vector<int> not_stable, not_dominant, not_popular;  // some such matching avoids e
};

// Bipartite only. Throws std::logic_error if either union identity fails.
EdgeSets popular_edge_sets(const Instance& inst, const std::vector<Matching>& popular,
                           const std::vector<Matching>& dominant);

struct Approximation {
  Matching best_stable;
  Matching best_dominant;
  Matching chosen;
  Rational cost;
};

// Better of a max-weight stable and a max-weight dominant matching.
// Nonnegative costs; the dominant side is found by oracle enumeration.
Approximation approx_max_weight_popular(const Instance& inst, const oracle::Budget& budget = {}, int jobs = 1);

}  // namespace popmatch::dominant
