#include "popmatch/oracle.hpp"

#include <algorithm>
#include <functional>
#include <thread>

namespace popmatch::oracle {

namespace {

void check_nodes(const Instance& inst, const Budget& budget) {
  if (inst.size() > budget.max_nodes)
    throw BudgetExceeded("oracle limited to " + std::to_string(budget.max_nodes) + " nodes, instance has " +
                         std::to_string(inst.size()));
}

// Runs body(i) for i in [0, n) over `jobs` threads; each index is written by one thread only.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += jobs) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<Matching> Classification::with(bool Flags::*flag) const {
  std::vector<Matching> out;
  for (std::size_t i = 0; i < matchings.size(); ++i)
    if (flags[i].*flag) out.push_back(matchings[i]);
  return out;
}

std::vector<Matching> enumerate_matchings(const Instance& inst, const Budget& budget) {
  check_nodes(inst, budget);
  std::vector<Matching> out;
  std::vector<int> chosen;
  std::vector<char> used(inst.size(), 0);
  std::function<void(int)> rec = [&](int from) {
    if (out.size() >= budget.max_matchings)
      throw BudgetExceeded("more than " + std::to_string(budget.max_matchings) + " matchings");
    out.push_back(Matching::from_edges(inst, chosen));
    for (int e = from; e < inst.edge_count(); ++e) {
      const Edge& ed = inst.edge(e);
      if (used[ed.u] || used[ed.v]) continue;
      used[ed.u] = used[ed.v] = 1;
      chosen.push_back(e);
      rec(e + 1);
      chosen.pop_back();
      used[ed.u] = used[ed.v] = 0;
    }
  };
  rec(0);
  return out;
}

bool popular_against(const Instance& inst, const Matching& m, const std::vector<Matching>& all) {
  for (const auto& n : all)
    if (delta(inst, m, n) < 0) return false;
  return true;
}

bool dominant_against(const Instance& inst, const Matching& m, const std::vector<Matching>& all) {
  if (!popular_against(inst, m, all)) return false;
  for (const auto& n : all)
    if (n.size() > m.size() && delta(inst, m, n) <= 0) return false;
  return true;
}

bool strongly_dominant_by_partition(const Instance& inst, const Matching& m) {
  const int n = inst.size();
  if (n > 20) throw BudgetExceeded("partition search limited to 20 nodes");
  std::vector<EdgeLabel> labels(inst.edge_count());
  for (int e = 0; e < inst.edge_count(); ++e) labels[e] = label_of(inst, m, e);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    auto in_r = [&](int u) { return (mask >> u) & 1u; };
    bool ok = true;
    for (int u = 0; u < n && ok; ++u)
      if (in_r(u) && !m.matched(u)) ok = false;
    for (int e = 0; e < inst.edge_count() && ok; ++e) {
      bool ru = in_r(inst.edge(e).u), rv = in_r(inst.edge(e).v);
      if (labels[e] == EdgeLabel::Matched && ru == rv) ok = false;
      if (labels[e] == EdgeLabel::PlusPlus && !(ru && rv)) ok = false;
      if (labels[e] != EdgeLabel::MinusMinus && !ru && !rv) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

Classification classify(const Instance& inst, const Budget& budget, int jobs) {
  Classification c;
  c.matchings = enumerate_matchings(inst, budget);
  c.flags.resize(c.matchings.size());
  parallel_for(c.matchings.size(), jobs, [&](std::size_t i) {
    const Matching& m = c.matchings[i];
    Flags& f = c.flags[i];
    f.stable = is_stable(inst, m);
    f.popular = popular_against(inst, m, c.matchings);
    f.dominant = f.popular && dominant_against(inst, m, c.matchings);
    f.strongly_dominant = strongly_dominant_by_partition(inst, m);
  });
  for (const auto& f : c.flags) {
    if ((f.stable && !f.popular) || (f.dominant && !f.popular) || (f.strongly_dominant && !f.dominant))
      throw std::logic_error("oracle: flag consistency violated");
  }
  return c;
}

std::vector<Matching> popular_matchings(const Instance& inst, const Budget& budget, int jobs) {
  auto all = enumerate_matchings(inst, budget);
  std::vector<char> keep(all.size(), 0);
  parallel_for(all.size(), jobs, [&](std::size_t i) { keep[i] = popular_against(inst, all[i], all); });
  std::vector<Matching> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) out.push_back(all[i]);
  return out;
}

std::vector<Matching> dominant_matchings(const Instance& inst, const Budget& budget, int jobs) {
  auto all = enumerate_matchings(inst, budget);
  std::vector<char> keep(all.size(), 0);
  parallel_for(all.size(), jobs, [&](std::size_t i) { keep[i] = dominant_against(inst, all[i], all); });
  std::vector<Matching> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) out.push_back(all[i]);
  return out;
}

std::optional<std::pair<Matching, Rational>> optimize(const Instance& inst, Objective obj, const Budget& budget,
                                                      int jobs) {
  std::optional<std::pair<Matching, Rational>> best;
  for (const auto& m : popular_matchings(inst, budget, jobs)) {
    Rational c = cost_of(inst, m);
    bool better = !best || (obj == Objective::min_cost_popular ? c < best->second : c > best->second);
    if (better) best = {m, c};
  }
  return best;
}

std::optional<Matching> pmffe(const Instance& inst, const std::vector<int>& e0, const std::vector<int>& e1,
                              const std::vector<int>& u0, const std::vector<int>& u1, const Budget& budget,
                              int jobs) {
  for (int e : e0)
    if (e < 0 || e >= inst.edge_count()) throw InputError("forbidden edge is not an edge");
  Matching forced = Matching::from_edges(inst, e1);  // throws if E1 is not a matching
  for (int u : u0)
    if (u < 0 || u >= inst.size()) throw InputError("unknown node in U0");
  for (int u : u1)
    if (u < 0 || u >= inst.size()) throw InputError("unknown node in U1");
  for (const auto& m : popular_matchings(inst, budget, jobs)) {
    bool ok = std::all_of(forced.edges().begin(), forced.edges().end(), [&](int e) { return m.contains(e); }) &&
              std::none_of(e0.begin(), e0.end(), [&](int e) { return m.contains(e); }) &&
              std::none_of(u0.begin(), u0.end(), [&](int u) { return m.matched(u); }) &&
              std::all_of(u1.begin(), u1.end(), [&](int u) { return m.matched(u); });
    if (ok) return m;
  }
  return std::nullopt;
}

}  // namespace popmatch::oracle
