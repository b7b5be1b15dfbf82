#pragma once

#include <bitset>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "popmatch/altgraph.hpp"
#include "popmatch/core.hpp"

namespace popmatch::tw {

struct TreeDecomposition {
  std::vector<std::vector<int>> bags;  // sorted node ids
  std::vector<std::pair<int, int>> edges;
  int root = -1;  // optional hint read from a "root <i>" line

  int width() const;
};

// "bag <i>: <name> ..." and "tedge <i> <j>" lines; '#' starts a comment.
TreeDecomposition parse_td(const Instance& inst, std::string_view text);
std::string write_td(const Instance& inst, const TreeDecomposition& td);
// Throws InputError naming the first broken condition.
void validate(const Instance& inst, const TreeDecomposition& td);

// Min-fill elimination; if that exceeds width_cap and the graph has at most 12
// nodes, an exact elimination-order search. Throws InputError if the cap is
// still not met. Bag 0 is the natural root.
TreeDecomposition find_tree_decomposition(const Instance& inst, int width_cap);
// Exact treewidth by subset DP; n <= 16.
int exact_treewidth(const Instance& inst);

struct DichotomicDecomposition {
  TreeDecomposition td;
  int root = 0;
  std::vector<int> successor;  // -1 at the root
  std::vector<std::vector<int>> predecessors;
};

// Orients towards `root` and splits bags with three or more predecessors.
DichotomicDecomposition make_dichotomic(const TreeDecomposition& td, int root = 0);
std::string write_dichotomic(const Instance& inst, const DichotomicDecomposition& d);

// cost(e_i) + 2^i / (2^(|E|+1) * D), D the lcm of the cost denominators.
Instance perturb_costs(const Instance& inst);

// One path of a configuration, stored in canonical orientation: u is a node of
// S; v is a node of S greater than u, or -1 for an end somewhere in X.
struct Segment {
  int u = 0;
  int v = -1;
  int exposed = 0;    // 0..2
  int plus_plus = 0;  // 0..1
  int par_u = 0;      // 0 if the edge at u is a matching edge
  int par_v = 0;
  friend auto operator<=>(const Segment&, const Segment&) = default;
};

// Configurations are taken up to permutation and reversal of their paths, so a
// configuration is a sorted multiset of segments in which every node of S
// appears at most twice.
struct Configuration {
  std::vector<Segment> segments;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

std::string to_string(const Configuration& c);

// Every configuration over s. Throws InputError if the list would exceed `limit`.
std::vector<Configuration> enumerate_configurations(const std::vector<int>& s, std::size_t limit = 2'000'000);
std::uint64_t count_configurations(int s_size);

struct TippingPoint {
  std::vector<Configuration> maximal;  // antichain of maximal active configurations
  std::vector<int> s_matching;         // edge ids of M_S
  bool active(const Configuration& c) const;
  friend auto operator<=>(const TippingPoint&, const TippingPoint&) = default;
};

using NodeMask = std::bitset<128>;

// G_M[X u S] or a shortcut graph. `global` maps local nodes to instance nodes;
// fresh chain ends are -1 and fresh chain interiors -2.
struct LocalView {
  AltGraph graph;
  std::vector<bool> in_s;
  std::vector<int> global;
};

LocalView restricted_view(const Instance& inst, const Matching& m, const std::vector<int>& s,
                          const std::vector<int>& x);

PopularityCertificate is_locally_popular(const Instance& inst, const std::vector<int>& s,
                                         const std::vector<int>& x, const Matching& m);
// Active configurations of a view, as the sorted antichain of maximal ones.
std::vector<Configuration> maximal_active(const LocalView& view, long budget = 20'000'000);
TippingPoint tipping_point_direct(const Instance& inst, const std::vector<int>& s, const std::vector<int>& x,
                                  const Matching& m);

// G_M[bag] plus one fresh chain per segment of c1 and c2. S-side nodes are bag
// nodes in `s`; everything else is on the X side.
LocalView build_shortcut_graph(const Instance& inst, const std::vector<int>& bag, const std::vector<int>& s,
                               const Matching& m, const Configuration& c1, const Configuration& c2);

struct PathPiece {
  int index = 0;  // 0, 1, ..., q; -1 stands for the final piece
  bool hidden = false;
  std::vector<int> nodes;
};
// Splits a path into alternating stretches inside and outside X. Single-node
// pieces are dropped.
std::vector<PathPiece> decompose_path(const std::vector<int>& path, const std::vector<int>& s,
                                      const std::vector<int>& x);
std::vector<int> juxtapose(const std::vector<PathPiece>& pieces);

struct DpOptions {
  bool assert_internal = false;
  int jobs = 1;
};

struct DpStats {
  int bags = 0;
  std::size_t max_table = 0;
  std::size_t candidates = 0;
  std::size_t internal_checks = 0;
};

// Minimum-cost popular matching by dynamic programming over the decomposition.
// The returned cost is the original, unperturbed one.
std::optional<std::pair<Matching, Rational>> min_cost_popular_tw(const Instance& inst,
                                                                 const DichotomicDecomposition& dtd,
                                                                 const DpOptions& opts = {},
                                                                 DpStats* stats = nullptr);

}  // namespace popmatch::tw
