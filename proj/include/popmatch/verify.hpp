#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "popmatch/altgraph.hpp"
#include "popmatch/core.hpp"

namespace popmatch {

struct Witness {
  std::vector<Rational> alpha;  // indexed by node
};

struct Partition {
  std::vector<int> left;
  std::vector<int> right;
};

Witness parse_witness(const Instance& inst, std::string_view text);
std::string write_witness(const Instance& inst, const Witness& w);

namespace verify {

PopularityCertificate is_popular_structural(const Instance& inst, const Matching& m);
// Throws InputError if m is not popular.
PopularityCertificate is_dominant_structural(const Instance& inst, const Matching& m);
std::optional<Partition> is_strongly_dominant(const Instance& inst, const Matching& m);
// alpha = 1 on R, -1 on matched L, 0 on unmatched L.
Witness partition_witness(const Instance& inst, const Matching& m, const Partition& p);

bool verify_witness(const Instance& inst, const Matching& m, const Witness& w);
// Bipartite only; exact LP feasibility.
std::optional<Witness> find_witness(const Instance& inst, const Matching& m);
// Entries in {0, +1, -1}. Throws InputError when the search is exhausted.
Witness find_unit_witness(const Instance& inst, const Matching& m);

struct PopularSubgraph {
  std::vector<int> edges;                    // popular edge ids, sorted
  std::vector<std::vector<int>> components;  // node sets, every node in exactly one
};
PopularSubgraph popular_subgraph(const Instance& inst, const std::vector<Matching>& popular);

// Nodes matched by the A-proposing stable matching (all stable matchings agree).
std::vector<bool> stable_nodes(const Instance& inst);

}  // namespace verify
}  // namespace popmatch
