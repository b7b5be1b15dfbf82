#include "popmatch/dominant.hpp"

#include <algorithm>
#include <set>

#include "popmatch/stable.hpp"

namespace popmatch::dominant {

BidirectedInstance build_bidirected(const Instance& inst) {
  BidirectedInstance out;
  out.base_size = inst.size();
  std::vector<std::string> names;
  for (int u = 0; u < inst.size(); ++u) {
    const std::string& s = inst.name(u);
    if (s.back() == '+' || s.back() == '-' || s.find('$') != std::string::npos)
      throw InputError("node id " + s + " clashes with the reserved +, - and $d suffixes");
    names.push_back(s + "+");
    names.push_back(s + "-");
    names.push_back(s + "$d");
  }
  std::vector<std::vector<std::string>> prefs(names.size());
  for (int u = 0; u < inst.size(); ++u) {
    auto& plus = prefs[out.plus(u)];
    auto& minus = prefs[out.minus(u)];
    minus.push_back(names[out.dummy(u)]);
    for (int v : inst.prefs(u)) {
      plus.push_back(names[out.minus(v)]);
      minus.push_back(names[out.plus(v)]);
    }
    plus.push_back(names[out.dummy(u)]);
    prefs[out.dummy(u)] = {names[out.plus(u)], names[out.minus(u)]};
  }
  out.graph = Instance::make(Kind::roommates, std::move(names), {}, std::move(prefs));
  return out;
}

std::optional<std::pair<Matching, Witness>> strongly_dominant(const Instance& inst) {
  BidirectedInstance h = build_bidirected(inst);
  auto stable = stable::irving(h.graph);
  if (!stable) return std::nullopt;
  std::vector<std::pair<int, int>> pairs;
  Witness w;
  w.alpha.assign(inst.size(), Rational(0));
  for (int u = 0; u < inst.size(); ++u) {
    int p = stable->partner(h.plus(u));
    if (p >= 0 && p % 3 == 1) {
      pairs.emplace_back(u, p / 3);
      w.alpha[u] = 1;
    }
    int q = stable->partner(h.minus(u));
    if (q >= 0 && q % 3 == 0) w.alpha[u] = -1;
  }
  Matching m = Matching::from_pairs(inst, pairs);
  if (!verify::verify_witness(inst, m, w)) throw std::logic_error("strongly_dominant: projected witness rejected");
  return std::make_pair(m, w);
}

EdgeSets popular_edge_sets(const Instance& inst, const std::vector<Matching>& popular,
                           const std::vector<Matching>& dominant) {
  if (!inst.bipartite()) throw InputError("popular edge sets need a bipartite instance");
  auto stable = stable::enumerate_stable(inst);
  auto in_some = [&](const std::vector<Matching>& ms) {
    std::vector<int> out;
    for (int e = 0; e < inst.edge_count(); ++e)
      if (std::any_of(ms.begin(), ms.end(), [&](const Matching& m) { return m.contains(e); })) out.push_back(e);
    return out;
  };
  auto avoided = [&](const std::vector<Matching>& ms) {
    std::vector<int> out;
    for (int e = 0; e < inst.edge_count(); ++e)
      if (std::any_of(ms.begin(), ms.end(), [&](const Matching& m) { return !m.contains(e); })) out.push_back(e);
    return out;
  };
  auto unite = [](std::vector<int> a, const std::vector<int>& b) {
    std::set<int> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return std::vector<int>(s.begin(), s.end());
  };
  EdgeSets r;
  r.stable = in_some(stable);
  r.dominant = in_some(dominant);
  r.popular = in_some(popular);
  r.not_stable = avoided(stable);
  r.not_dominant = avoided(dominant);
  r.not_popular = avoided(popular);
  if (unite(r.stable, r.dominant) != r.popular)
    throw std::logic_error("popular edges differ from the union of stable and dominant edges");
  if (unite(r.not_stable, r.not_dominant) != r.not_popular)
    throw std::logic_error("popular-avoidable edges differ from the stable/dominant union");
  return r;
}

Approximation approx_max_weight_popular(const Instance& inst, const oracle::Budget& budget, int jobs) {
  if (!inst.bipartite()) throw InputError("approximation needs a bipartite instance");
  for (const auto& c : inst.costs())
    if (c < 0) throw InputError("approximation needs nonnegative costs");
  Approximation a{stable::max_weight_stable(inst), Matching(inst), Matching(inst), 0};
  auto dom = oracle::dominant_matchings(inst, budget, jobs);
  if (dom.empty()) throw std::logic_error("bipartite instance without a dominant matching");
  a.best_dominant = dom.front();
  Rational best = cost_of(inst, dom.front());
  for (const auto& m : dom)
    if (cost_of(inst, m) > best) {
      best = cost_of(inst, m);
      a.best_dominant = m;
    }
  Rational s = cost_of(inst, a.best_stable);
  a.chosen = s >= best ? a.best_stable : a.best_dominant;
  a.cost = std::max(s, best);
  return a;
}

}  // namespace popmatch::dominant
