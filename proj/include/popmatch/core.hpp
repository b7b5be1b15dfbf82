#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace popmatch {

using Rational = mpq_class;

// Malformed input or a violated precondition. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive search gave up. Exit code 3.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { bipartite, roommates };
enum class Side { A, B };

// Edge endpoints are stored with u's name lexicographically smaller than v's.
struct Edge {
  int u;
  int v;
};

class Instance {
 public:
  Instance() = default;

  // Validates mutuality, strictness, sides and costs; throws InputError.
  // `costs` is keyed by node-name pairs in either order.
  static Instance make(Kind kind, std::vector<std::string> names, std::vector<Side> sides,
                       std::vector<std::vector<std::string>> prefs,
                       const std::vector<std::tuple<std::string, std::string, Rational>>& costs = {});

  Kind kind() const { return kind_; }
  bool bipartite() const { return kind_ == Kind::bipartite; }
  int size() const { return static_cast<int>(names_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::string& name(int u) const { return names_[u]; }
  const std::vector<std::string>& names() const { return names_; }
  Side side(int u) const { return sides_[u]; }
  const std::vector<int>& prefs(int u) const { return prefs_[u]; }

  // Position of v in u's list, -1 if not adjacent.
  int rank(int u, int v) const;
  // Edge index in canonical order, -1 if not an edge.
  int edge_id(int u, int v) const;
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Rational& cost(int e) const { return costs_[e]; }
  const std::vector<Rational>& costs() const { return costs_; }
  // Edge ids incident to u, in u's preference order.
  const std::vector<int>& incident(int u) const { return incident_[u]; }

  int index_of(std::string_view name) const;  // throws InputError
  std::optional<int> find(std::string_view name) const;

  Instance with_costs(std::vector<Rational> costs) const;

 private:
  Kind kind_ = Kind::roommates;
  std::vector<std::string> names_;
  std::vector<Side> sides_;
  std::vector<std::vector<int>> prefs_;
  std::vector<std::unordered_map<int, int>> rank_;
  std::vector<Edge> edges_;
  std::vector<Rational> costs_;
  std::vector<std::vector<int>> incident_;
  std::unordered_map<std::string, int> index_;
  std::unordered_map<std::uint64_t, int> edge_index_;
};

class Matching {
 public:
  Matching() = default;
  explicit Matching(const Instance& inst);
  // Throws InputError on a non-edge or overlapping edges.
  static Matching from_edges(const Instance& inst, const std::vector<int>& edge_ids);
  static Matching from_pairs(const Instance& inst, const std::vector<std::pair<int, int>>& pairs);

  int partner(int u) const { return partner_[u]; }
  bool matched(int u) const { return partner_[u] >= 0; }
  // Sorted edge ids.
  const std::vector<int>& edges() const { return edges_; }
  int size() const { return static_cast<int>(edges_.size()); }
  int node_count() const { return static_cast<int>(partner_.size()); }
  bool contains(int e) const;

  // Canonical edge-set order: lexicographic over the sorted edge ids.
  friend bool operator<(const Matching& a, const Matching& b) { return a.edges_ < b.edges_; }
  friend bool operator==(const Matching& a, const Matching& b) { return a.edges_ == b.edges_; }

 private:
  std::vector<int> partner_;
  std::vector<int> edges_;
};

enum class EdgeLabel { PlusPlus, PlusMinus, MinusPlus, MinusMinus, Matched };

const char* label_name(EdgeLabel l);

struct LabeledEdge {
  int edge;
  EdgeLabel label;
};

struct LabeledGraph {
  std::vector<LabeledEdge> kept;
  std::vector<int> removed;  // (-,-) edge ids
  std::vector<bool> exposed;
};

struct WeightSystem {
  std::vector<int> edge;  // indexed by edge id
  std::vector<int> self;  // indexed by node
};

// +1 if u prefers v to its partner in M (being unmatched is worst), -1 otherwise.
int vote(const Instance& inst, const Matching& m, int u, int v);
EdgeLabel label_of(const Instance& inst, const Matching& m, int e);
LabeledGraph label_edges(const Instance& inst, const Matching& m);
WeightSystem weight_system(const Instance& inst, const Matching& m);
// phi(M,N) - phi(N,M).
int delta(const Instance& inst, const Matching& m, const Matching& n);
// wt_M of N with self-loops on N-unmatched nodes.
int weight_of(const WeightSystem& w, const Instance& inst, const Matching& n);
Rational cost_of(const Instance& inst, const Matching& m);
// No (+,+) edge.
bool is_stable(const Instance& inst, const Matching& m);

Instance parse_instance(std::string_view text);
std::string write_instance(const Instance& inst);
Matching parse_matching(const Instance& inst, std::string_view text);
std::string write_matching(const Instance& inst, const Matching& m);
Rational parse_rational(std::string_view s);
std::string to_string(const Rational& r);

std::string read_file(const std::string& path);

}  // namespace popmatch
