#pragma once

#include <random>
#include <string>
#include <vector>

#include <algorithm>
#include <numeric>
#include <set>

#include "popmatch/core.hpp"
#include "popmatch/treewidth.hpp"

namespace fixtures {

using popmatch::Instance;
using popmatch::Kind;
using popmatch::Matching;
using popmatch::Side;

// Four agents on K4 with no stable matching.
inline Instance d_instance() {
  return popmatch::parse_instance(
      "popmatch v1 roommates\n"
      "node d0\nnode d1\nnode d2\nnode d3\n"
      "pref d0: d1 d2 d3\n"
      "pref d1: d2 d3 d0\n"
      "pref d2: d3 d1 d0\n"
      "pref d3: d1 d2 d0\n");
}

// a,b,c,d: the matching {(a,d),(b,c)} is popular and dominant but not strongly dominant.
inline Instance abcd_instance() {
  return popmatch::parse_instance(
      "popmatch v1 roommates\n"
      "node a\nnode b\nnode c\nnode d\n"
      "pref a: b c d\n"
      "pref b: a c\n"
      "pref c: a b\n"
      "pref d: a\n");
}

// a1: b1 > b2, a2: b2 > b1, b1: a2 > a1, b2: a1 > a2; two stable matchings.
inline Instance two_by_two() {
  return popmatch::parse_instance(
      "popmatch v1 bipartite\n"
      "node a1 A\nnode a2 A\nnode b1 B\nnode b2 B\n"
      "pref a1: b1 b2\npref a2: b2 b1\npref b1: a2 a1\npref b2: a1 a2\n");
}

inline Matching pairs(const Instance& inst, const std::vector<std::pair<std::string, std::string>>& ps) {
  std::vector<std::pair<int, int>> idx;
  for (const auto& [a, b] : ps) idx.emplace_back(inst.index_of(a), inst.index_of(b));
  return Matching::from_pairs(inst, idx);
}

// Random strict-preference instance. Bipartite sides are split at a random point.
inline Instance random_instance(std::mt19937_64& rng, int n, bool bipartite, double density) {
  std::vector<std::string> names;
  std::vector<Side> sides;
  int split = n / 2;
  if (bipartite && n >= 2) split = std::uniform_int_distribution<int>(1, n - 1)(rng);
  for (int i = 0; i < n; ++i) {
    names.push_back("v" + std::to_string(i));
    sides.push_back(i < split ? Side::A : Side::B);
  }
  std::vector<std::vector<int>> adj(n);
  std::bernoulli_distribution coin(density);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (bipartite && sides[i] == sides[j]) continue;
      if (coin(rng)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  std::vector<std::vector<std::string>> prefs(n);
  for (int i = 0; i < n; ++i) {
    std::shuffle(adj[i].begin(), adj[i].end(), rng);
    for (int j : adj[i]) prefs[i].push_back(names[j]);
  }
  return Instance::make(bipartite ? Kind::bipartite : Kind::roommates, names, sides, prefs);
}

inline Instance with_random_costs(std::mt19937_64& rng, const Instance& inst, int lo, int hi, int den) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<popmatch::Rational> c;
  for (int e = 0; e < inst.edge_count(); ++e) {
    popmatch::Rational r(d(rng), den);
    r.canonicalize();
    c.push_back(r);
  }
  return inst.with_costs(c);
}

// The mixed corpus used by the property tests: 4..8 nodes, alternating kinds.
inline std::vector<Instance> corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    int n = 4 + i % 5;
    bool bip = i % 2 == 0;
    double density = std::uniform_real_distribution<double>(0.35, 0.9)(rng);
    out.push_back(random_instance(rng, n, bip, density));
  }
  return out;
}

inline Instance from_adjacency(std::mt19937_64& rng, int n, const std::vector<std::pair<int, int>>& edges, bool bipartite,
                        const std::vector<Side>& sides) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::vector<std::string>> prefs(n);
  for (int i = 0; i < n; ++i) {
    std::shuffle(adj[i].begin(), adj[i].end(), rng);
    for (int j : adj[i]) prefs[i].push_back(names[j]);
  }
  return Instance::make(bipartite ? Kind::bipartite : Kind::roommates, names, sides, prefs);
}

// Paths, cycles, trees and sparse random graphs on 4..10 nodes, width <= 3, random rational costs.
inline std::vector<Instance> low_width_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Instance> out;
  while (static_cast<int>(out.size()) < count) {
    int i = static_cast<int>(out.size());
    int n = 4 + static_cast<int>(rng() % 7);
    bool bip = i % 2 == 0;
    std::vector<Side> sides(n, Side::A);
    for (int v = 0; v < n; ++v) sides[v] = (v % 2 == 0) ? Side::A : Side::B;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::set<std::pair<int, int>> es;
    auto add = [&](int a, int b) {
      if (a == b) return;
      if (bip && sides[a] == sides[b]) return;
      es.insert({std::min(a, b), std::max(a, b)});
    };
    switch (i % 4) {
      case 0:
        for (int v = 0; v + 1 < n; ++v) add(perm[v], perm[v + 1]);
        break;
      case 1:
        for (int v = 0; v < n; ++v) add(perm[v], perm[(v + 1) % n]);
        break;
      case 2:
        for (int v = 1; v < n; ++v) add(perm[v], perm[rng() % v]);
        break;
      default: {
        int m = n + static_cast<int>(rng() % (n + 1));
        for (int t = 0; t < m; ++t) add(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
      }
    }
    Instance inst = from_adjacency(rng, n, {es.begin(), es.end()}, bip, sides);
    if (popmatch::tw::find_tree_decomposition(inst, 10).width() > 3) continue;
    out.push_back(with_random_costs(rng, inst, 0, 6, 1 + static_cast<int>(rng() % 3)));
  }
  return out;
}

}  // namespace fixtures
