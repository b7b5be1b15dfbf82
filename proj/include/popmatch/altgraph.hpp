#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "popmatch/core.hpp"

namespace popmatch {

enum class Violation { AlternatingCycleWithPlusPlus, PathTwoPlusPlus, PathExposedToPlusPlus, AugmentingPath };

const char* violation_name(Violation v);

struct PopularityCertificate {
  bool verdict = true;
  std::optional<Violation> kind;
  std::vector<int> nodes;  // node sequence of the violating structure
};

// A graph in which every edge is either a matching edge or a non-matching edge
// that is not (-,-). This is G_M, an induced piece of it, or a synthetic graph
// with hand-assigned labels. `mate` is the partner inside this graph; a node
// can have mate -1 and still be covered by an edge leaving the graph.
struct AltGraph {
  struct Arc {
    int to;
    bool matched;
    bool plus_plus;
    // A structure may not end with this arc, or start with it, while the
    // given node lies on the structure (-1: no restriction).
    int stop_guard = -1;
    int start_guard = -1;
  };
  std::vector<std::vector<Arc>> adj;
  std::vector<int> mate;
  std::vector<bool> exposed;

  int size() const { return static_cast<int>(adj.size()); }
  int add_node(bool is_exposed);
  void add_edge(int u, int v, bool matched, bool plus_plus);
  const Arc* arc(int u, int v) const;
};

// G_M on all nodes.
AltGraph alt_graph(const Instance& inst, const Matching& m);
// G_M induced by `nodes`; local index i stands for nodes[i]. Exposure is global.
AltGraph alt_graph(const Instance& inst, const Matching& m, const std::vector<int>& nodes);

// Any cycle or path of the three forbidden kinds. `budget` bounds DFS steps.
std::optional<std::pair<Violation, std::vector<int>>> find_forbidden(const AltGraph& g,
                                                                     long budget = 50'000'000);
std::optional<std::vector<int>> find_augmenting(const AltGraph& g, long budget = 50'000'000);

// True iff `nodes` is a genuine structure of the given kind in g.
bool check_structure(const AltGraph& g, Violation kind, const std::vector<int>& nodes);

}  // namespace popmatch
