#include "popmatch/verify.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "popmatch/lp.hpp"
#include "popmatch/stable.hpp"

namespace popmatch {

Witness parse_witness(const Instance& inst, std::string_view text) {
  Witness w;
  w.alpha.assign(inst.size(), Rational(0));
  std::vector<bool> seen(inst.size(), false);
  std::istringstream in{std::string(text)};
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string kw, id, val, extra;
    if (!(ls >> kw)) continue;
    if (kw != "alpha" || !(ls >> id >> val) || (ls >> extra) || id.empty() || id.back() != ':')
      throw InputError("line " + std::to_string(ln) + ": expected 'alpha <id>: <rational>'");
    id.pop_back();
    auto u = inst.find(id);
    if (!u) throw InputError("line " + std::to_string(ln) + ": unknown node " + id);
    if (seen[*u]) throw InputError("line " + std::to_string(ln) + ": duplicate alpha for " + id);
    seen[*u] = true;
    w.alpha[*u] = parse_rational(val);
  }
  for (int u = 0; u < inst.size(); ++u)
    if (!seen[u]) throw InputError("witness missing node " + inst.name(u));
  return w;
}

std::string write_witness(const Instance& inst, const Witness& w) {
  std::ostringstream os;
  for (int u = 0; u < inst.size(); ++u) os << "alpha " << inst.name(u) << ": " << to_string(w.alpha[u]) << "\n";
  return os.str();
}

namespace verify {

PopularityCertificate is_popular_structural(const Instance& inst, const Matching& m) {
  if (m.node_count() != inst.size()) throw InputError("matching does not belong to this instance");
  PopularityCertificate c;
  if (auto v = find_forbidden(alt_graph(inst, m))) {
    c.verdict = false;
    c.kind = v->first;
    c.nodes = std::move(v->second);
  }
  return c;
}

PopularityCertificate is_dominant_structural(const Instance& inst, const Matching& m) {
  if (!is_popular_structural(inst, m).verdict) throw InputError("matching is not popular");
  PopularityCertificate c;
  if (auto p = find_augmenting(alt_graph(inst, m))) {
    c.verdict = false;
    c.kind = Violation::AugmentingPath;
    c.nodes = std::move(*p);
  }
  return c;
}

std::optional<Partition> is_strongly_dominant(const Instance& inst, const Matching& m) {
  if (m.node_count() != inst.size()) throw InputError("matching does not belong to this instance");
  TwoSat sat(inst.size());
  for (int e = 0; e < inst.edge_count(); ++e) {
    int u = inst.edge(e).u, v = inst.edge(e).v;
    switch (label_of(inst, m, e)) {
      case EdgeLabel::PlusPlus:
        sat.add_unit(u, true);
        sat.add_unit(v, true);
        break;
      case EdgeLabel::Matched:
        sat.add_clause(u, true, v, true);
        sat.add_clause(u, false, v, false);
        break;
      case EdgeLabel::MinusMinus: break;
      default: sat.add_clause(u, true, v, true);
    }
  }
  for (int u = 0; u < inst.size(); ++u)
    if (!m.matched(u)) sat.add_unit(u, false);
  auto sol = sat.solve();
  if (!sol) return std::nullopt;
  Partition p;
  for (int u = 0; u < inst.size(); ++u) ((*sol)[u] ? p.right : p.left).push_back(u);
  return p;
}

Witness partition_witness(const Instance& inst, const Matching& m, const Partition& p) {
  Witness w;
  w.alpha.assign(inst.size(), Rational(0));
  for (int u : p.right) w.alpha[u] = 1;
  for (int u : p.left)
    if (m.matched(u)) w.alpha[u] = -1;
  return w;
}

bool verify_witness(const Instance& inst, const Matching& m, const Witness& w) {
  if (static_cast<int>(w.alpha.size()) != inst.size()) throw InputError("witness does not cover every node");
  WeightSystem ws = weight_system(inst, m);
  Rational sum = 0;
  for (const auto& a : w.alpha) sum += a;
  if (sum != 0) return false;
  for (int e = 0; e < inst.edge_count(); ++e)
    if (w.alpha[inst.edge(e).u] + w.alpha[inst.edge(e).v] < ws.edge[e]) return false;
  for (int u = 0; u < inst.size(); ++u)
    if (w.alpha[u] < ws.self[u]) return false;
  return true;
}

std::optional<Witness> find_witness(const Instance& inst, const Matching& m) {
  if (!inst.bipartite()) throw InputError("find_witness needs a bipartite instance");
  if (m.node_count() != inst.size()) throw InputError("matching does not belong to this instance");
  WeightSystem ws = weight_system(inst, m);
  // alpha_u = beta_u + self_u with beta >= 0, which absorbs the self-loop constraints.
  std::vector<LinearConstraint> cons;
  for (int e = 0; e < inst.edge_count(); ++e) {
    int u = inst.edge(e).u, v = inst.edge(e).v;
    cons.push_back({{{u, 1}, {v, 1}}, Relation::ge, Rational(ws.edge[e] - ws.self[u] - ws.self[v])});
  }
  LinearConstraint total{{}, Relation::eq, 0};
  for (int u = 0; u < inst.size(); ++u) {
    total.terms.push_back({u, 1});
    total.rhs -= ws.self[u];
  }
  cons.push_back(total);
  auto beta = lp_feasible(inst.size(), cons);
  if (!beta) return std::nullopt;
  Witness w;
  for (int u = 0; u < inst.size(); ++u) w.alpha.push_back((*beta)[u] + ws.self[u]);
  return w;
}

std::vector<bool> stable_nodes(const Instance& inst) {
  Matching s = stable::gale_shapley(inst, Side::A);
  std::vector<bool> out(inst.size());
  for (int u = 0; u < inst.size(); ++u) out[u] = s.matched(u);
  return out;
}

namespace {

// Domains are bit sets over {-1, 0, +1} at bits 0, 1, 2.
constexpr int kNeg = 1, kZero = 2, kPos = 4;

int value_bit(int a) { return 1 << (a + 1); }

class UnitSearch {
 public:
  UnitSearch(const Instance& inst, const Matching& m) : inst_(inst), m_(m), ws_(weight_system(inst, m)) {
    dom_.assign(inst.size(), kNeg | kZero | kPos);
    // Any witness is an optimal dual, so complementary slackness pins unmatched
    // nodes to zero and makes each matching edge tight.
    for (int u = 0; u < inst.size(); ++u)
      if (!m.matched(u)) dom_[u] = kZero;
    if (inst.bipartite()) {
      auto st = stable_nodes(inst);
      for (int u = 0; u < inst.size(); ++u)
        if (!st[u]) dom_[u] &= m.matched(u) ? kNeg : kZero;
    }
  }

  std::optional<Witness> run() {
    if (!propagate(dom_)) return std::nullopt;
    if (!dfs(dom_)) return std::nullopt;
    Witness w;
    for (int u = 0; u < inst_.size(); ++u)
      w.alpha.push_back(result_[u] == kNeg ? -1 : result_[u] == kZero ? 0 : 1);
    return w;
  }

 private:
  bool supported(int a, int db, int w) const {
    for (int b = -1; b <= 1; ++b)
      if ((db & value_bit(b)) && a + b >= w) return true;
    return false;
  }

  bool propagate(std::vector<int>& dom) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int e = 0; e < inst_.edge_count(); ++e) {
        int u = inst_.edge(e).u, v = inst_.edge(e).v;
        bool tight = m_.contains(e);
        for (int side = 0; side < 2; ++side) {
          int x = side ? v : u, y = side ? u : v;
          int nd = 0;
          for (int a = -1; a <= 1; ++a) {
            if (!(dom[x] & value_bit(a))) continue;
            bool ok = tight ? (dom[y] & value_bit(-a)) != 0 : supported(a, dom[y], ws_.edge[e]);
            if (ok) nd |= value_bit(a);
          }
          if (nd != dom[x]) {
            dom[x] = nd;
            changed = true;
            if (!nd) return false;
          }
        }
      }
    }
    return true;
  }

  bool dfs(std::vector<int>& dom) {
    int pick = -1, best = 4;
    for (int u = 0; u < inst_.size(); ++u) {
      int c = __builtin_popcount(dom[u]);
      if (c > 1 && c < best) {
        best = c;
        pick = u;
      }
    }
    if (pick < 0) {
      result_ = dom;
      return true;
    }
    for (int bit : {kZero, kPos, kNeg}) {
      if (!(dom[pick] & bit)) continue;
      std::vector<int> next(dom);
      next[pick] = bit;
      if (propagate(next) && dfs(next)) return true;
    }
    return false;
  }

  const Instance& inst_;
  const Matching& m_;
  WeightSystem ws_;
  std::vector<int> dom_;
  std::vector<int> result_;
};

}  // namespace

Witness find_unit_witness(const Instance& inst, const Matching& m) {
  if (m.node_count() != inst.size()) throw InputError("matching does not belong to this instance");
  auto w = UnitSearch(inst, m).run();
  if (!w) throw InputError("no witness with entries in {0,+1,-1}: matching is not popular");
  return *w;
}

PopularSubgraph popular_subgraph(const Instance& inst, const std::vector<Matching>& popular) {
  PopularSubgraph out;
  std::vector<char> used(inst.edge_count(), 0);
  for (const auto& m : popular)
    for (int e : m.edges()) used[e] = 1;
  std::vector<int> parent(inst.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (!used[e]) continue;
    out.edges.push_back(e);
    int a = find(inst.edge(e).u), b = find(inst.edge(e).v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<int> slot(inst.size(), -1);
  for (int u = 0; u < inst.size(); ++u) {
    int r = find(u);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.components.size());
      out.components.emplace_back();
    }
    out.components[slot[r]].push_back(u);
  }
  return out;
}

}  // namespace verify
}  // namespace popmatch
