#include "popmatch/stable.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace popmatch::stable {

Matching gale_shapley(const Instance& inst, Side proposing) {
  if (!inst.bipartite()) throw InputError("Gale-Shapley needs a bipartite instance");
  const int n = inst.size();
  std::vector<int> next(n, 0), held(n, -1);
  std::deque<int> free;
  for (int u = 0; u < n; ++u)
    if (inst.side(u) == proposing) free.push_back(u);
  while (!free.empty()) {
    int p = free.front();
    free.pop_front();
    const auto& list = inst.prefs(p);
    while (next[p] < static_cast<int>(list.size())) {
      int r = list[next[p]++];
      int cur = held[r];
      if (cur < 0 || inst.rank(r, p) < inst.rank(r, cur)) {
        held[r] = p;
        if (cur >= 0) free.push_back(cur);
        break;
      }
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (int r = 0; r < n; ++r)
    if (held[r] >= 0) pairs.emplace_back(held[r], r);
  return Matching::from_pairs(inst, pairs);
}

namespace {

// Preference table whose lists shrink by symmetric pair deletion.
class Table {
 public:
  explicit Table(const Instance& inst) : inst_(inst) {
    const int n = inst.size();
    alive_.resize(n);
    size_.resize(n);
    for (int u = 0; u < n; ++u) {
      alive_[u].assign(inst.prefs(u).size(), 1);
      size_[u] = static_cast<int>(inst.prefs(u).size());
    }
  }

  int size(int u) const { return size_[u]; }
  int first(int u) const { return nth(u, 0); }
  int second(int u) const { return nth(u, 1); }
  int last(int u) const {
    const auto& l = inst_.prefs(u);
    for (int i = static_cast<int>(l.size()) - 1; i >= 0; --i)
      if (alive_[u][i]) return l[i];
    return -1;
  }

  void remove(int u, int v) {
    int a = inst_.rank(u, v), b = inst_.rank(v, u);
    if (alive_[u][a]) {
      alive_[u][a] = 0;
      --size_[u];
    }
    if (alive_[v][b]) {
      alive_[v][b] = 0;
      --size_[v];
    }
  }

  // Deletes every entry of u's list ranked below v.
  void truncate_after(int u, int v) {
    const auto& l = inst_.prefs(u);
    for (int i = inst_.rank(u, v) + 1; i < static_cast<int>(l.size()); ++i)
      if (alive_[u][i]) remove(u, l[i]);
  }

 private:
  int nth(int u, int k) const {
    const auto& l = inst_.prefs(u);
    for (std::size_t i = 0; i < l.size(); ++i)
      if (alive_[u][i] && k-- == 0) return l[i];
    return -1;
  }

  const Instance& inst_;
  std::vector<std::vector<char>> alive_;
  std::vector<int> size_;
};

}  // namespace

std::optional<Matching> irving(const Instance& inst) {
  const int n = inst.size();
  Table t(inst);
  // Phase 1: proposals, with the receiver cutting everyone worse than its new proposer.
  std::vector<int> holds(n, -1);
  std::deque<int> free;
  for (int u = 0; u < n; ++u) free.push_back(u);
  while (!free.empty()) {
    int x = free.front();
    free.pop_front();
    if (t.size(x) == 0) continue;
    int y = t.first(x);
    int old = holds[y];
    holds[y] = x;
    t.truncate_after(y, x);
    if (old >= 0 && old != x) free.push_back(old);
  }
  // Phase 2: eliminate exposed rotations until every list has at most one entry.
  // A list emptied here, unlike in phase 1, means no stable matching exists.
  std::vector<char> listed(n);
  for (int u = 0; u < n; ++u) listed[u] = t.size(u) > 0;
  while (true) {
    int x0 = -1;
    for (int u = 0; u < n; ++u)
      if (t.size(u) >= 2) {
        x0 = u;
        break;
      }
    if (x0 < 0) break;
    std::vector<int> seq{x0};
    std::map<int, int> pos{{x0, 0}};
    int start;
    while (true) {
      int y = t.second(seq.back());
      int nx = t.last(y);
      if (y < 0 || nx < 0) throw std::logic_error("irving: rotation search left the reduced table");
      auto it = pos.find(nx);
      if (it != pos.end()) {
        start = it->second;
        break;
      }
      pos[nx] = static_cast<int>(seq.size());
      seq.push_back(nx);
    }
    std::vector<int> xs(seq.begin() + start, seq.end());
    std::vector<int> next_y;
    for (int x : xs) next_y.push_back(t.second(x));
    for (std::size_t i = 0; i < xs.size(); ++i) t.truncate_after(next_y[i], xs[i]);
    for (int u = 0; u < n; ++u)
      if (listed[u] && t.size(u) == 0) return std::nullopt;
  }
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u) {
    if (t.size(u) != 1) continue;
    int v = t.first(u);
    if (t.size(v) != 1 || t.first(v) != u) throw std::logic_error("irving: inconsistent final table");
    if (u < v) pairs.emplace_back(u, v);
  }
  Matching m = Matching::from_pairs(inst, pairs);
  if (!is_stable(inst, m)) throw std::logic_error("irving: produced a blocked matching");
  return m;
}

namespace {

// McVitie-Wilson break-marriage: A-node m leaves its partner, who then accepts only
// proposers better than m; the rejection chain must end at her.
std::optional<Matching> break_marriage(const Instance& inst, const Matching& base, int m) {
  const int n = inst.size();
  std::vector<int> partner(n);
  for (int u = 0; u < n; ++u) partner[u] = base.partner(u);
  const int w = partner[m];
  partner[m] = partner[w] = -1;
  int p = m;
  int pos = inst.rank(m, w) + 1;
  while (true) {
    const auto& list = inst.prefs(p);
    if (pos >= static_cast<int>(list.size())) return std::nullopt;
    int v = list[pos++];
    if (v == w) {
      if (inst.rank(w, p) < inst.rank(w, m)) {
        partner[p] = w;
        partner[w] = p;
        break;
      }
      continue;
    }
    int cur = partner[v];
    if (cur < 0) return std::nullopt;
    if (inst.rank(v, p) < inst.rank(v, cur)) {
      partner[p] = v;
      partner[v] = p;
      partner[cur] = -1;
      p = cur;
      pos = inst.rank(cur, v) + 1;
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    if (inst.side(u) == Side::A && partner[u] >= 0) pairs.emplace_back(u, partner[u]);
  Matching out = Matching::from_pairs(inst, pairs);
  if (!is_stable(inst, out)) return std::nullopt;
  return out;
}

}  // namespace

std::vector<Matching> enumerate_stable(const Instance& inst, std::size_t cap) {
  if (!inst.bipartite()) throw InputError("stable enumeration needs a bipartite instance");
  Matching start = gale_shapley(inst, Side::A);
  std::set<Matching> seen{start};
  std::vector<Matching> stack{start};
  while (!stack.empty()) {
    Matching cur = stack.back();
    stack.pop_back();
    for (int m = 0; m < inst.size(); ++m) {
      if (inst.side(m) != Side::A || !cur.matched(m)) continue;
      auto next = break_marriage(inst, cur, m);
      if (!next || seen.count(*next)) continue;
      if (seen.size() >= cap) throw BudgetExceeded("more than " + std::to_string(cap) + " stable matchings");
      seen.insert(*next);
      stack.push_back(*next);
    }
  }
  return {seen.begin(), seen.end()};
}

Matching max_weight_stable(const Instance& inst, std::size_t cap) {
  auto all = enumerate_stable(inst, cap);
  const Matching* best = &all.front();
  Rational best_cost = cost_of(inst, *best);
  for (const auto& m : all) {
    Rational c = cost_of(inst, m);
    if (c > best_cost) {
      best = &m;
      best_cost = c;
    }
  }
  return *best;
}

}  // namespace popmatch::stable
