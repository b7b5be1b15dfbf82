#include "popmatch/altgraph.hpp"

#include <algorithm>
#include <deque>

namespace popmatch {

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::AlternatingCycleWithPlusPlus: return "alternating-cycle-with-plus-plus";
    case Violation::PathTwoPlusPlus: return "path-two-plus-plus";
    case Violation::PathExposedToPlusPlus: return "path-exposed-to-plus-plus";
    case Violation::AugmentingPath: return "augmenting-path";
  }
  return "?";
}

int AltGraph::add_node(bool is_exposed) {
  adj.emplace_back();
  mate.push_back(-1);
  exposed.push_back(is_exposed);
  return size() - 1;
}

void AltGraph::add_edge(int u, int v, bool matched, bool plus_plus) {
  adj[u].push_back({v, matched, plus_plus && !matched});
  adj[v].push_back({u, matched, plus_plus && !matched});
  if (matched) {
    mate[u] = v;
    mate[v] = u;
  }
}

const AltGraph::Arc* AltGraph::arc(int u, int v) const {
  for (const auto& a : adj[u])
    if (a.to == v) return &a;
  return nullptr;
}

AltGraph alt_graph(const Instance& inst, const Matching& m) {
  std::vector<int> all(inst.size());
  for (int u = 0; u < inst.size(); ++u) all[u] = u;
  return alt_graph(inst, m, all);
}

AltGraph alt_graph(const Instance& inst, const Matching& m, const std::vector<int>& nodes) {
  AltGraph g;
  std::vector<int> local(inst.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    local[nodes[i]] = static_cast<int>(i);
    g.add_node(!m.matched(nodes[i]));
  }
  for (int e = 0; e < inst.edge_count(); ++e) {
    int a = local[inst.edge(e).u], b = local[inst.edge(e).v];
    if (a < 0 || b < 0) continue;
    EdgeLabel l = label_of(inst, m, e);
    if (l == EdgeLabel::MinusMinus) continue;
    g.add_edge(a, b, l == EdgeLabel::Matched, l == EdgeLabel::PlusPlus);
  }
  return g;
}

namespace {

// State 2v: the next edge out of v must be v's matching edge.
// State 2v+1: the next edge out of v must be a non-matching edge.
// Returns, for every state, whether some terminal state is reachable by an
// alternating walk. Walks over-approximate paths, so a false entry is exact.
std::vector<char> walk_good(const AltGraph& g, const std::vector<char>& terminal) {
  const int n = g.size();
  std::vector<std::vector<int>> rev(2 * n);
  for (int v = 0; v < n; ++v) {
    if (g.mate[v] >= 0) rev[2 * g.mate[v] + 1].push_back(2 * v);
    for (const auto& a : g.adj[v])
      if (!a.matched) rev[2 * a.to].push_back(2 * v + 1);
  }
  std::vector<char> good(terminal);
  std::deque<int> q;
  for (int s = 0; s < 2 * n; ++s)
    if (good[s]) q.push_back(s);
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (int p : rev[s])
      if (!good[p]) {
        good[p] = 1;
        q.push_back(p);
      }
  }
  return good;
}

struct Budget {
  long left;
  void tick() {
    if (--left < 0) throw BudgetExceeded("alternating structure search exceeded its step budget");
  }
};

class ForbiddenSearch {
 public:
  ForbiddenSearch(const AltGraph& g, long budget) : g_(g), budget_{budget} {
    const int n = g.size();
    std::vector<char> terminal(2 * n, 0);
    for (int v = 0; v < n; ++v)
      for (const auto& a : g.adj[v])
        if (a.plus_plus) terminal[2 * v + 1] = 1;
    good_ = walk_good(g, terminal);
    on_path_.assign(n, 0);
  }

  std::optional<std::pair<Violation, std::vector<int>>> run() {
    const int n = g_.size();
    bool any = false;
    for (int v = 0; v < n; ++v) {
      if (g_.exposed[v] && good_[2 * v + 1]) any = true;
      for (const auto& a : g_.adj[v])
        if (a.plus_plus && good_[2 * a.to]) any = true;
    }
    if (!any) return std::nullopt;
    for (int s = 0; s < n; ++s) {
      if (!g_.exposed[s] || !good_[2 * s + 1]) continue;
      start_ = -1;
      start_guard_ = -1;
      push(s);
      if (dfs(s, true)) return found_;
      pop(s);
    }
    for (int x = 0; x < n; ++x) {
      for (const auto& a : g_.adj[x]) {
        if (!a.plus_plus || !good_[2 * a.to]) continue;
        start_ = x;
        start_guard_ = a.start_guard;
        push(x);
        push(a.to);
        if (dfs(a.to, false)) return found_;
        pop(a.to);
        pop(x);
      }
    }
    return std::nullopt;
  }

 private:
  void push(int v) {
    path_.push_back(v);
    on_path_[v] = 1;
  }
  void pop(int v) {
    path_.pop_back();
    on_path_[v] = 0;
  }

  // need_non_matching: the next edge must be non-matching.
  bool dfs(int v, bool need_non_matching) {
    budget_.tick();
    if (need_non_matching) {
      for (const auto& a : g_.adj[v]) {
        if (a.matched || !a.plus_plus || on_path_[a.to]) continue;
        if (a.stop_guard >= 0 && on_path_[a.stop_guard]) continue;
        if (start_guard_ >= 0 && (on_path_[start_guard_] || start_guard_ == a.to || start_guard_ == a.stop_guard))
          continue;
        found_ = {start_ < 0 ? Violation::PathExposedToPlusPlus : Violation::PathTwoPlusPlus, path_};
        found_.second.push_back(a.to);
        return true;
      }
      for (const auto& a : g_.adj[v]) {
        if (a.matched || on_path_[a.to] || !good_[2 * a.to]) continue;
        push(a.to);
        if (dfs(a.to, false)) return true;
        pop(a.to);
      }
      return false;
    }
    int m = g_.mate[v];
    if (m < 0) return false;
    if (m == start_ && path_.size() >= 4) {
      found_ = {Violation::AlternatingCycleWithPlusPlus, path_};
      return true;
    }
    if (on_path_[m] || !good_[2 * m + 1]) return false;
    push(m);
    if (dfs(m, true)) return true;
    pop(m);
    return false;
  }

  const AltGraph& g_;
  Budget budget_;
  std::vector<char> good_;
  std::vector<char> on_path_;
  std::vector<int> path_;
  int start_ = -1;
  int start_guard_ = -1;
  std::pair<Violation, std::vector<int>> found_;
};

class AugmentingSearch {
 public:
  AugmentingSearch(const AltGraph& g, long budget) : g_(g), budget_{budget} {
    const int n = g.size();
    std::vector<char> terminal(2 * n, 0);
    for (int v = 0; v < n; ++v)
      for (const auto& a : g.adj[v])
        if (!a.matched && g.exposed[a.to]) terminal[2 * v + 1] = 1;
    good_ = walk_good(g, terminal);
    on_path_.assign(n, 0);
  }

  std::optional<std::vector<int>> run() {
    for (int s = 0; s < g_.size(); ++s) {
      if (!g_.exposed[s] || !good_[2 * s + 1]) continue;
      path_ = {s};
      on_path_[s] = 1;
      if (dfs(s)) return path_;
      on_path_[s] = 0;
    }
    return std::nullopt;
  }

 private:
  // At v, about to take a non-matching edge.
  bool dfs(int v) {
    budget_.tick();
    for (const auto& a : g_.adj[v]) {
      if (a.matched || on_path_[a.to] || !g_.exposed[a.to]) continue;
      path_.push_back(a.to);
      return true;
    }
    for (const auto& a : g_.adj[v]) {
      if (a.matched || on_path_[a.to] || !good_[2 * a.to]) continue;
      int m = g_.mate[a.to];
      if (m < 0 || on_path_[m] || !good_[2 * m + 1]) continue;
      path_.push_back(a.to);
      path_.push_back(m);
      on_path_[a.to] = on_path_[m] = 1;
      if (dfs(m)) return true;
      on_path_[a.to] = on_path_[m] = 0;
      path_.pop_back();
      path_.pop_back();
    }
    return false;
  }

  const AltGraph& g_;
  Budget budget_;
  std::vector<char> good_;
  std::vector<char> on_path_;
  std::vector<int> path_;
};

}  // namespace

std::optional<std::pair<Violation, std::vector<int>>> find_forbidden(const AltGraph& g, long budget) {
  return ForbiddenSearch(g, budget).run();
}

std::optional<std::vector<int>> find_augmenting(const AltGraph& g, long budget) {
  return AugmentingSearch(g, budget).run();
}

bool check_structure(const AltGraph& g, Violation kind, const std::vector<int>& nodes) {
  const std::size_t k = nodes.size();
  std::vector<int> sorted(nodes);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (int v : nodes)
    if (v < 0 || v >= g.size()) return false;
  bool cycle = kind == Violation::AlternatingCycleWithPlusPlus;
  if (k < 2 || (cycle && (k < 4 || k % 2 != 0))) return false;
  std::vector<const AltGraph::Arc*> arcs;
  std::size_t edge_count = cycle ? k : k - 1;
  for (std::size_t i = 0; i < edge_count; ++i) {
    const auto* a = g.arc(nodes[i], nodes[(i + 1) % k]);
    if (!a) return false;
    arcs.push_back(a);
  }
  for (std::size_t i = 0; i + 1 < arcs.size(); ++i)
    if (arcs[i]->matched == arcs[i + 1]->matched) return false;
  if (cycle && arcs.front()->matched == arcs.back()->matched) return false;
  switch (kind) {
    case Violation::AlternatingCycleWithPlusPlus:
      return std::any_of(arcs.begin(), arcs.end(), [](auto* a) { return a->plus_plus; });
    case Violation::PathTwoPlusPlus:
      return arcs.size() >= 3 && arcs.front()->plus_plus && arcs.back()->plus_plus;
    case Violation::PathExposedToPlusPlus:
      return g.exposed[nodes.front()] && arcs.back()->plus_plus;
    case Violation::AugmentingPath:
      return g.exposed[nodes.front()] && g.exposed[nodes.back()] && !arcs.front()->matched &&
             !arcs.back()->matched;
  }
  return false;
}

}  // namespace popmatch
