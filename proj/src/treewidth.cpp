#include "popmatch/treewidth.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace popmatch::tw {

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

int parse_index(const std::string& tok, int line) {
  try {
    std::size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos == tok.size() && v >= 0 && v < (1L << 30)) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw InputError("line " + std::to_string(line) + ": bad bag index '" + tok + "'");
}

bool subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<std::vector<char>> adjacency(const Instance& inst) {
  const int n = inst.size();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& e : inst.edges()) adj[e.u][e.v] = adj[e.v][e.u] = 1;
  return adj;
}

int min_fill_next(const std::vector<std::vector<char>>& adj, const std::vector<char>& gone) {
  const int n = static_cast<int>(adj.size());
  int best = -1;
  long best_fill = 0;
  int best_deg = 0;
  for (int v = 0; v < n; ++v) {
    if (gone[v]) continue;
    std::vector<int> nb;
    for (int w = 0; w < n; ++w)
      if (!gone[w] && adj[v][w]) nb.push_back(w);
    long fill = 0;
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j)
        if (!adj[nb[i]][nb[j]]) ++fill;
    int deg = static_cast<int>(nb.size());
    if (best < 0 || fill < best_fill || (fill == best_fill && deg < best_deg)) {
      best = v;
      best_fill = fill;
      best_deg = deg;
    }
  }
  return best;
}

std::vector<int> min_fill_order(const Instance& inst) {
  auto adj = adjacency(inst);
  const int n = inst.size();
  std::vector<char> gone(n, 0);
  std::vector<int> order;
  for (int step = 0; step < n; ++step) {
    int v = min_fill_next(adj, gone);
    std::vector<int> nb;
    for (int w = 0; w < n; ++w)
      if (!gone[w] && adj[v][w]) nb.push_back(w);
    for (int a : nb)
      for (int b : nb)
        if (a != b) adj[a][b] = 1;
    gone[v] = 1;
    order.push_back(v);
  }
  return order;
}

// For each subset S (eliminated first), the smallest achievable max bag size - 1.
std::vector<int> exact_order(const Instance& inst, int* width) {
  const int n = inst.size();
  if (n > 16) throw InputError("exact treewidth search is limited to 16 nodes");
  std::vector<std::uint32_t> nbr(n, 0);
  for (const auto& e : inst.edges()) {
    nbr[e.u] |= 1u << e.v;
    nbr[e.v] |= 1u << e.u;
  }
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
  // Number of nodes outside S + v reachable from v through S.
  auto q_size = [&](std::uint32_t s, int v) {
    std::uint32_t seen = 1u << v, frontier = 1u << v, out = 0;
    while (frontier) {
      int u = __builtin_ctz(frontier);
      frontier &= frontier - 1;
      std::uint32_t nb = nbr[u] & ~seen;
      seen |= nb;
      out |= nb & ~s;
      frontier |= nb & s;
    }
    return __builtin_popcount(out);
  };
  std::vector<int> tw(std::size_t(1) << n, n + 1);
  std::vector<signed char> last(std::size_t(1) << n, -1);
  tw[0] = -1;
  for (std::uint32_t s = 1; s <= full; ++s) {
    for (std::uint32_t rest = s; rest; rest &= rest - 1) {
      int v = __builtin_ctz(rest);
      std::uint32_t prev = s & ~(1u << v);
      int val = std::max(tw[prev], q_size(prev, v));
      if (val < tw[s]) {
        tw[s] = val;
        last[s] = static_cast<signed char>(v);
      }
    }
    if (s == full) break;
  }
  if (width) *width = n == 0 ? -1 : tw[full];
  std::vector<int> order(n);
  std::uint32_t s = full;
  for (int i = n - 1; i >= 0; --i) {
    order[i] = last[s];
    s &= ~(1u << last[s]);
  }
  return order;
}

TreeDecomposition from_order(const Instance& inst, const std::vector<int>& order) {
  const int n = inst.size();
  TreeDecomposition td;
  if (n == 0) {
    td.bags.push_back({});
    td.root = 0;
    return td;
  }
  auto adj = adjacency(inst);
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  std::vector<std::vector<int>> bag(n);
  std::vector<int> parent(n, -1);
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    std::vector<int> later;
    for (int w = 0; w < n; ++w)
      if (adj[v][w] && pos[w] > i) later.push_back(w);
    for (int a : later)
      for (int b : later)
        if (a != b) adj[a][b] = 1;
    bag[v] = later;
    bag[v].push_back(v);
    std::sort(bag[v].begin(), bag[v].end());
    int p = -1;
    for (int w : later)
      if (p < 0 || pos[w] < pos[p]) p = w;
    parent[v] = p;
  }
  // Forest roots are chained together; the last eliminated node is the root.
  int root = order[n - 1];
  for (int v = 0; v < n; ++v)
    if (parent[v] < 0 && v != root) parent[v] = root;
  // Tree over nodes, then contract edges whose bags are nested.
  std::vector<std::set<int>> tadj(n);
  for (int v = 0; v < n; ++v)
    if (parent[v] >= 0) {
      tadj[v].insert(parent[v]);
      tadj[parent[v]].insert(v);
    }
  std::vector<char> alive(n, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n && !changed; ++i) {
      int a = order[i];
      if (!alive[a]) continue;
      for (int b : tadj[a]) {
        int keep = -1, drop = -1;
        if (subset(bag[a], bag[b])) keep = b, drop = a;
        else if (subset(bag[b], bag[a])) keep = a, drop = b;
        if (keep < 0) continue;
        for (int c : tadj[drop])
          if (c != keep) {
            tadj[c].erase(drop);
            tadj[c].insert(keep);
            tadj[keep].insert(c);
          }
        tadj[keep].erase(drop);
        tadj[drop].clear();
        alive[drop] = 0;
        if (root == drop) root = keep;
        changed = true;
        break;
      }
    }
  }
  // Renumber breadth-first from the root.
  std::vector<int> index(n, -1);
  std::vector<int> queue{root};
  index[root] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    int a = queue[h];
    td.bags.push_back(bag[a]);
    for (int b : tadj[a])
      if (index[b] < 0) {
        index[b] = static_cast<int>(queue.size());
        queue.push_back(b);
        td.edges.emplace_back(index[a], index[b]);
      }
  }
  td.root = 0;
  return td;
}

}  // namespace

int TreeDecomposition::width() const {
  int w = -1;
  for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
  return w;
}

TreeDecomposition parse_td(const Instance& inst, std::string_view text) {
  TreeDecomposition td;
  std::map<int, int> ids;
  std::vector<std::pair<int, int>> raw_edges;
  std::vector<int> edge_lines;
  std::optional<int> raw_root;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    auto tok = split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tok[0] == "bag") {
      if (tok.size() < 2 || tok[1].empty() || tok[1].back() != ':')
        throw InputError("line " + std::to_string(line_no) + ": expected 'bag <i>: ...'");
      int id = parse_index(tok[1].substr(0, tok[1].size() - 1), line_no);
      if (ids.count(id)) throw InputError("line " + std::to_string(line_no) + ": duplicate bag " + std::to_string(id));
      ids[id] = static_cast<int>(td.bags.size());
      std::vector<int> bag;
      for (std::size_t i = 2; i < tok.size(); ++i) {
        auto v = inst.find(tok[i]);
        if (!v) throw InputError("line " + std::to_string(line_no) + ": unknown node '" + tok[i] + "'");
        bag.push_back(*v);
      }
      std::sort(bag.begin(), bag.end());
      if (std::adjacent_find(bag.begin(), bag.end()) != bag.end())
        throw InputError("line " + std::to_string(line_no) + ": node repeated in bag");
      td.bags.push_back(bag);
    } else if (tok[0] == "tedge") {
      if (tok.size() != 3) throw InputError("line " + std::to_string(line_no) + ": expected 'tedge <i> <j>'");
      raw_edges.emplace_back(parse_index(tok[1], line_no), parse_index(tok[2], line_no));
      edge_lines.push_back(line_no);
    } else if (tok[0] == "root") {
      if (tok.size() != 2) throw InputError("line " + std::to_string(line_no) + ": expected 'root <i>'");
      raw_root = parse_index(tok[1], line_no);
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown directive '" + tok[0] + "'");
    }
    if (end == text.size()) break;
  }
  for (std::size_t i = 0; i < raw_edges.size(); ++i) {
    auto a = ids.find(raw_edges[i].first), b = ids.find(raw_edges[i].second);
    if (a == ids.end() || b == ids.end())
      throw InputError("line " + std::to_string(edge_lines[i]) + ": tedge names an undeclared bag");
    td.edges.emplace_back(a->second, b->second);
  }
  if (raw_root) {
    auto r = ids.find(*raw_root);
    if (r == ids.end()) throw InputError("root names an undeclared bag");
    td.root = r->second;
  }
  return td;
}

std::string write_td(const Instance& inst, const TreeDecomposition& td) {
  std::ostringstream out;
  for (std::size_t i = 0; i < td.bags.size(); ++i) {
    out << "bag " << i << ":";
    for (int v : td.bags[i]) out << ' ' << inst.name(v);
    out << '\n';
  }
  for (const auto& [a, b] : td.edges) out << "tedge " << a << ' ' << b << '\n';
  if (td.root >= 0) out << "root " << td.root << '\n';
  return out.str();
}

void validate(const Instance& inst, const TreeDecomposition& td) {
  const int k = static_cast<int>(td.bags.size());
  const int n = inst.size();
  if (k == 0) throw InputError("tree decomposition has no bags");
  for (const auto& b : td.bags)
    for (int v : b)
      if (v < 0 || v >= n) throw InputError("bag holds an unknown node");
  if (static_cast<int>(td.edges.size()) != k - 1) throw InputError("bag tree must have exactly one edge fewer than bags");
  std::vector<int> uf(k);
  std::iota(uf.begin(), uf.end(), 0);
  std::function<int(int)> find = [&](int a) { return uf[a] == a ? a : uf[a] = find(uf[a]); };
  std::vector<std::vector<int>> tadj(k);
  for (const auto& [a, b] : td.edges) {
    if (a < 0 || b < 0 || a >= k || b >= k || a == b) throw InputError("bad tree edge");
    if (find(a) == find(b)) throw InputError("bag tree has a cycle");
    uf[find(a)] = find(b);
    tadj[a].push_back(b);
    tadj[b].push_back(a);
  }
  if (td.root >= k) throw InputError("root names an undeclared bag");
  std::vector<std::vector<int>> holding(n);
  for (int i = 0; i < k; ++i)
    for (int v : td.bags[i]) holding[v].push_back(i);
  for (int v = 0; v < n; ++v) {
    if (holding[v].empty()) throw InputError("node " + inst.name(v) + " is in no bag");
    std::vector<char> in(k, 0), seen(k, 0);
    for (int i : holding[v]) in[i] = 1;
    std::vector<int> stack{holding[v][0]};
    seen[holding[v][0]] = 1;
    std::size_t count = 0;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      ++count;
      for (int b : tadj[a])
        if (in[b] && !seen[b]) {
          seen[b] = 1;
          stack.push_back(b);
        }
    }
    if (count != holding[v].size()) throw InputError("bags holding " + inst.name(v) + " are not connected");
  }
  for (const auto& e : inst.edges()) {
    bool covered = false;
    for (int i : holding[e.u])
      if (std::binary_search(td.bags[i].begin(), td.bags[i].end(), e.v)) covered = true;
    if (!covered) throw InputError("edge " + inst.name(e.u) + " " + inst.name(e.v) + " is in no bag");
  }
}

int exact_treewidth(const Instance& inst) {
  int w = -1;
  exact_order(inst, &w);
  return w;
}

TreeDecomposition find_tree_decomposition(const Instance& inst, int width_cap) {
  TreeDecomposition td = from_order(inst, min_fill_order(inst));
  if (td.width() > width_cap && inst.size() <= 12) {
    int w = -1;
    auto order = exact_order(inst, &w);
    if (w < td.width()) td = from_order(inst, order);
  }
  if (td.width() > width_cap)
    throw InputError("no tree decomposition of width <= " + std::to_string(width_cap) + " found (best " +
                     std::to_string(td.width()) + ")");
  return td;
}

DichotomicDecomposition make_dichotomic(const TreeDecomposition& td, int root) {
  const int k = static_cast<int>(td.bags.size());
  if (root < 0 || root >= k) throw InputError("root bag out of range");
  DichotomicDecomposition d;
  d.td.bags = td.bags;
  d.root = root;
  std::vector<std::vector<int>> tadj(k);
  for (const auto& [a, b] : td.edges) {
    tadj[a].push_back(b);
    tadj[b].push_back(a);
  }
  d.successor.assign(k, -1);
  d.predecessors.assign(k, {});
  std::vector<char> seen(k, 0);
  std::vector<int> queue{root};
  seen[root] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    int a = queue[h];
    std::sort(tadj[a].begin(), tadj[a].end());
    for (int b : tadj[a])
      if (!seen[b]) {
        seen[b] = 1;
        d.successor[b] = a;
        d.predecessors[a].push_back(b);
        queue.push_back(b);
      }
  }
  if (static_cast<int>(queue.size()) != k) throw InputError("bag tree is not connected");
  for (int b = 0; b < static_cast<int>(d.td.bags.size()); ++b) {
    while (d.predecessors[b].size() > 2) {
      auto preds = d.predecessors[b];
      std::size_t half = (preds.size() + 1) / 2;
      int copy = static_cast<int>(d.td.bags.size());
      d.td.bags.push_back(d.td.bags[b]);
      d.successor.push_back(b);
      d.predecessors.emplace_back(preds.begin(), preds.begin() + half);
      for (int p : d.predecessors[copy]) d.successor[p] = copy;
      d.predecessors[b].assign(preds.begin() + half, preds.end());
      d.predecessors[b].push_back(copy);
    }
  }
  for (int b = 0; b < static_cast<int>(d.td.bags.size()); ++b)
    if (d.successor[b] >= 0) d.td.edges.emplace_back(b, d.successor[b]);
  d.td.root = root;
  return d;
}

std::string write_dichotomic(const Instance& inst, const DichotomicDecomposition& d) {
  TreeDecomposition td = d.td;
  td.root = d.root;
  return write_td(inst, td);
}

Instance perturb_costs(const Instance& inst) {
  mpz_class den = 1;
  for (const auto& c : inst.costs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  const int m = inst.edge_count();
  mpz_class scale = den;
  scale <<= (m + 1);
  std::vector<Rational> out;
  for (int i = 0; i < m; ++i) {
    mpz_class num = 1;
    num <<= i;
    Rational eps(num, scale);
    eps.canonicalize();
    out.push_back(inst.cost(i) + eps);
  }
  return inst.with_costs(out);
}

std::string to_string(const Configuration& c) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < c.segments.size(); ++i) {
    const auto& s = c.segments[i];
    if (i) out << ' ';
    out << '(' << s.u << ',' << (s.v < 0 ? std::string("-") : std::to_string(s.v)) << " l=" << s.exposed
        << s.plus_plus << " p=" << s.par_u << s.par_v << ')';
  }
  out << '}';
  return out.str();
}

namespace {

std::vector<Segment> segment_types(const std::vector<int>& s) {
  std::vector<int> nodes(s);
  std::sort(nodes.begin(), nodes.end());
  std::vector<Segment> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::vector<int> others{-1};
    for (std::size_t j = i + 1; j < nodes.size(); ++j) others.push_back(nodes[j]);
    for (int v : others)
      for (int e = 0; e < 3; ++e)
        for (int p = 0; p < 2; ++p)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out.push_back({nodes[i], v, e, p, a, b});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::uint64_t count_configurations(int s_size) {
  if (s_size < 0 || s_size > 5) throw InputError("configuration count is limited to |S| <= 5");
  std::vector<int> s(s_size);
  std::iota(s.begin(), s.end(), 0);
  auto types = segment_types(s);
  int states = 1;
  for (int i = 0; i < s_size; ++i) states *= 3;
  std::vector<unsigned __int128> ways(states, 0);
  ways[0] = 1;
  std::vector<int> pow3(s_size + 1, 1);
  for (int i = 1; i <= s_size; ++i) pow3[i] = pow3[i - 1] * 3;
  auto deg = [&](int state, int v) { return (state / pow3[v]) % 3; };
  for (const auto& t : types) {
    std::vector<unsigned __int128> next(states, 0);
    for (int st = 0; st < states; ++st) {
      if (!ways[st]) continue;
      for (int mult = 0; mult <= 2; ++mult) {
        int du = deg(st, t.u) + mult, dv = t.v >= 0 ? deg(st, t.v) + mult : 0;
        if (du > 2 || dv > 2) break;
        int ns = st + mult * pow3[t.u] + (t.v >= 0 ? mult * pow3[t.v] : 0);
        next[ns] += ways[st];
      }
    }
    ways = std::move(next);
  }
  unsigned __int128 total = 0;
  for (auto w : ways) total += w;
  if (total > std::numeric_limits<std::uint64_t>::max()) throw InputError("configuration count overflows");
  return static_cast<std::uint64_t>(total);
}

std::vector<Configuration> enumerate_configurations(const std::vector<int>& s, std::size_t limit) {
  if (s.size() > 5 || count_configurations(static_cast<int>(s.size())) > limit)
    throw InputError("too many configurations for |S| = " + std::to_string(s.size()));
  auto types = segment_types(s);
  std::map<int, int> deg;
  std::vector<Configuration> out;
  std::vector<Segment> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == types.size()) {
      out.push_back({cur});
      return;
    }
    const auto& t = types[i];
    rec(i + 1);
    int added = 0;
    for (int mult = 1; mult <= 2; ++mult) {
      if (deg[t.u] + 1 > 2 || (t.v >= 0 && deg[t.v] + 1 > 2)) break;
      ++deg[t.u];
      if (t.v >= 0) ++deg[t.v];
      cur.push_back(t);
      ++added;
      rec(i + 1);
    }
    for (int j = 0; j < added; ++j) {
      --deg[t.u];
      if (t.v >= 0) --deg[t.v];
      cur.pop_back();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

bool TippingPoint::active(const Configuration& c) const {
  for (const auto& big : maximal)
    if (std::includes(big.segments.begin(), big.segments.end(), c.segments.begin(), c.segments.end())) return true;
  return false;
}

LocalView restricted_view(const Instance& inst, const Matching& m, const std::vector<int>& s,
                          const std::vector<int>& x) {
  std::vector<int> nodes(s);
  nodes.insert(nodes.end(), x.begin(), x.end());
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw InputError("S and X must be disjoint sets of distinct nodes");
  LocalView view;
  view.graph = alt_graph(inst, m, nodes);
  view.global = nodes;
  view.in_s.assign(nodes.size(), false);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    view.in_s[i] = std::find(s.begin(), s.end(), nodes[i]) != s.end();
  return view;
}

namespace {

void check_local_preconditions(const Instance& inst, const std::vector<int>& s, const std::vector<int>& x,
                               const Matching& m) {
  std::vector<char> in_xs(inst.size(), 0), in_x(inst.size(), 0);
  for (int v : s) {
    if (v < 0 || v >= inst.size()) throw InputError("S holds an unknown node");
    in_xs[v] = 1;
  }
  for (int v : x) {
    if (v < 0 || v >= inst.size()) throw InputError("X holds an unknown node");
    in_xs[v] = 1;
    in_x[v] = 1;
  }
  for (int e : m.edges()) {
    const auto& ed = inst.edge(e);
    if (!in_xs[ed.u] && !in_xs[ed.v])
      throw InputError("matching edge " + inst.name(ed.u) + " " + inst.name(ed.v) + " lies outside X and S");
  }
  for (int v : x)
    for (int w : inst.prefs(v))
      if (!in_xs[w]) throw InputError("S does not separate X: " + inst.name(v) + " has neighbour " + inst.name(w));
}

struct Realized {
  Segment seg;
  NodeMask mask;
};

// Every alternating S-path with at least one X node and at most one (+,+) edge,
// reduced to the inclusion-minimal X-masks per segment.
// Paths may not stop inside a shortcut chain.
constexpr int kChainInterior = -2;

std::map<Segment, std::vector<NodeMask>> realized_segments(const LocalView& view) {
  const AltGraph& g = view.graph;
  const int n = g.size();
  if (n > static_cast<int>(NodeMask().size())) throw InputError("local graph too large for configuration search");
  std::map<Segment, std::vector<NodeMask>> out;
  auto record = [&](const Segment& seg, const NodeMask& mask) {
    auto& list = out[seg];
    for (const auto& m : list)
      if ((m & ~mask).none()) return;
    std::erase_if(list, [&](const NodeMask& m) { return (mask & ~m).none(); });
    list.push_back(mask);
  };
  std::vector<char> on(n, 0);
  NodeMask mask;
  int s = 0;
  // Extends the path by the arc to w; par_s is the parity at s.
  std::function<void(int, const AltGraph::Arc&, int, int)> step = [&](int v, const AltGraph::Arc& a, int par_s,
                                                                       int pp) {
    (void)v;
    int w = a.to;
    if (on[w]) return;
    int npp = pp + (a.plus_plus ? 1 : 0);
    if (npp > 1) return;
    int par_end = a.matched ? 0 : 1;
    int exposed = int(g.exposed[s]) + int(g.exposed[w]);
    if (view.in_s[w]) {
      if (mask.any() && view.global[s] < view.global[w])
        record({view.global[s], view.global[w], exposed, npp, par_s, par_end}, mask);
      return;
    }
    mask.set(w);
    on[w] = 1;
    if (view.global[w] != kChainInterior) record({view.global[s], -1, exposed, npp, par_s, par_end}, mask);
    for (const auto& b : g.adj[w])
      if (b.matched != a.matched) step(w, b, par_s, npp);
    on[w] = 0;
    mask.reset(w);
  };
  for (s = 0; s < n; ++s) {
    if (!view.in_s[s]) continue;
    on[s] = 1;
    for (const auto& a : g.adj[s]) step(s, a, a.matched ? 0 : 1, 0);
    on[s] = 0;
  }
  return out;
}

}  // namespace

std::vector<Configuration> maximal_active(const LocalView& view, long budget);

namespace {

using Family = std::set<std::vector<Segment>>;

// All realizable multisets of segments (downward closed).
void active_family(const LocalView& view, Family& family, long budget) {
  auto realized = realized_segments(view);
  std::vector<Segment> keys;
  std::vector<std::vector<NodeMask>> masks;
  for (auto& [k, v] : realized) {
    keys.push_back(k);
    masks.push_back(v);
  }
  std::map<int, int> deg;
  std::vector<Segment> cur;
  long steps = 0;
  std::function<void(std::size_t, const NodeMask&)> rec = [&](std::size_t i, const NodeMask& used) {
    if (++steps > budget) throw BudgetExceeded("configuration search exceeded its step budget");
    if (i == keys.size()) {
      family.insert(cur);
      return;
    }
    rec(i + 1, used);
    const Segment& k = keys[i];
    auto fits = [&](int extra) { return deg[k.u] + extra <= 2 && (k.v < 0 || deg[k.v] + extra <= 2); };
    if (!fits(1)) return;
    auto bump = [&](int d) {
      deg[k.u] += d;
      if (k.v >= 0) deg[k.v] += d;
    };
    const auto& ms = masks[i];
    for (std::size_t r = 0; r < ms.size(); ++r) {
      if ((ms[r] & used).any()) continue;
      NodeMask u1 = used | ms[r];
      bump(1);
      cur.push_back(k);
      rec(i + 1, u1);
      if (fits(1)) {
        for (std::size_t r2 = r + 1; r2 < ms.size(); ++r2) {
          if ((ms[r2] & u1).any()) continue;
          bump(1);
          cur.push_back(k);
          rec(i + 1, u1 | ms[r2]);
          cur.pop_back();
          bump(-1);
        }
      }
      cur.pop_back();
      bump(-1);
    }
  };
  rec(0, NodeMask());
}

std::vector<Configuration> maximal_of(const Family& family) {
  std::set<Segment> keys;
  for (const auto& f : family) keys.insert(f.begin(), f.end());
  std::vector<Configuration> out;
  for (const auto& f : family) {
    bool maximal = true;
    for (const auto& k : keys) {
      std::vector<Segment> g(f);
      g.insert(std::upper_bound(g.begin(), g.end(), k), k);
      if (family.count(g)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back({f});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> s_matching_of(const Instance& inst, const Matching& m, const std::vector<int>& s) {
  std::vector<int> out;
  for (int e : m.edges()) {
    const auto& ed = inst.edge(e);
    if (std::find(s.begin(), s.end(), ed.u) != s.end() || std::find(s.begin(), s.end(), ed.v) != s.end())
      out.push_back(e);
  }
  return out;
}

PopularityCertificate certificate_of(const LocalView& view) {
  PopularityCertificate cert;
  if (auto f = find_forbidden(view.graph)) {
    cert.verdict = false;
    cert.kind = f->first;
    for (int v : f->second) cert.nodes.push_back(view.global[v]);
  }
  return cert;
}

}  // namespace

std::vector<Configuration> maximal_active(const LocalView& view, long budget) {
  Family family;
  active_family(view, family, budget);
  return maximal_of(family);
}

PopularityCertificate is_locally_popular(const Instance& inst, const std::vector<int>& s, const std::vector<int>& x,
                                         const Matching& m) {
  check_local_preconditions(inst, s, x, m);
  return certificate_of(restricted_view(inst, m, s, x));
}

TippingPoint tipping_point_direct(const Instance& inst, const std::vector<int>& s, const std::vector<int>& x,
                                  const Matching& m) {
  if (s.size() + x.size() > 24) throw InputError("tipping point search is limited to 24 nodes");
  check_local_preconditions(inst, s, x, m);
  TippingPoint tp;
  tp.maximal = maximal_active(restricted_view(inst, m, s, x));
  tp.s_matching = s_matching_of(inst, m, s);
  return tp;
}

namespace {

void add_chain(LocalView& h, const Segment& seg) {
  auto local = [&](int v) {
    for (std::size_t i = 0; i < h.global.size(); ++i)
      if (h.global[i] == v) return static_cast<int>(i);
    throw InputError("segment endpoint " + std::to_string(v) + " is not in the bag");
  };
  AltGraph& g = h.graph;
  int u = local(seg.u);
  int v = seg.v >= 0 ? local(seg.v) : -1;
  int rest = seg.exposed - int(g.exposed[u]) - (v >= 0 ? int(g.exposed[v]) : 0);
  bool fresh_exposed = rest == 1 && v < 0 && seg.par_v == 1;
  if (rest != 0 && !fresh_exposed) throw InputError("segment exposure does not match the matching");
  auto free_for_matching = [&](int w) { return g.mate[w] < 0 && !g.exposed[w]; };
  if (seg.par_u == 0 && !free_for_matching(u)) throw InputError("segment parity does not match the matching");
  if (v >= 0 && seg.par_v == 0 && !free_for_matching(v)) throw InputError("segment parity does not match the matching");
  if (g.exposed[u] && seg.par_u == 0) throw InputError("segment parity does not match the matching");

  // Edge kinds along the chain: 'm' matching, 'n' plain, 'p' (+,+).
  std::string kinds;
  if (seg.plus_plus) {
    kinds = seg.par_u == 0 ? "mp" : "nmp";
    kinds += seg.par_v == 0 ? "m" : "mn";
  } else {
    char first = seg.par_u == 0 ? 'm' : 'n', last = seg.par_v == 0 ? 'm' : 'n';
    std::size_t len = v >= 0 ? 2 : 1;
    for (;; ++len) {
      char end = (len % 2 == 1) ? first : (first == 'm' ? 'n' : 'm');
      if (end == last) break;
    }
    for (std::size_t i = 0; i < len; ++i) kinds += (i % 2 == 0) ? first : (first == 'm' ? 'n' : 'm');
  }
  int prev = u;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    int next;
    if (i + 1 < kinds.size()) {
      next = g.add_node(false);
    } else if (v >= 0) {
      next = v;
    } else {
      next = g.add_node(fresh_exposed);
    }
    if (next >= static_cast<int>(h.in_s.size())) {
      h.in_s.push_back(false);
      h.global.push_back(i + 1 < kinds.size() ? kChainInterior : -1);
    }
    g.add_edge(prev, next, kinds[i] == 'm', kinds[i] == 'p');
    if (kinds[i] == 'p' && v >= 0) {
      // Between two S nodes the (+,+) edge may really sit next to either end.
      g.adj[prev].back().stop_guard = v;
      g.adj[prev].back().start_guard = u;
      g.adj[next].back().stop_guard = u;
      g.adj[next].back().start_guard = v;
    }
    prev = next;
  }
}

}  // namespace

LocalView build_shortcut_graph(const Instance& inst, const std::vector<int>& bag, const std::vector<int>& s,
                               const Matching& m, const Configuration& c1, const Configuration& c2) {
  std::vector<int> x;
  for (int v : bag)
    if (std::find(s.begin(), s.end(), v) == s.end()) x.push_back(v);
  LocalView h = restricted_view(inst, m, s, x);
  for (const auto* c : {&c1, &c2})
    for (const auto& seg : c->segments) add_chain(h, seg);
  return h;
}

std::vector<PathPiece> decompose_path(const std::vector<int>& path, const std::vector<int>& s,
                                      const std::vector<int>& x) {
  if (path.empty()) throw InputError("empty path");
  {
    std::vector<int> sorted(path);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InputError("node repeated in path");
  }
  auto in = [](const std::vector<int>& set, int v) { return std::find(set.begin(), set.end(), v) != set.end(); };
  const int k = static_cast<int>(path.size());
  auto slice = [&](int a, int b) { return std::vector<int>(path.begin() + a, path.begin() + b + 1); };
  std::vector<PathPiece> raw;
  bool touches_x = std::any_of(path.begin(), path.end(), [&](int v) { return in(x, v); });
  if (!touches_x) return {PathPiece{-1, false, path}};
  int u;
  if (in(x, path[0])) {
    raw.push_back({0, false, slice(0, 0)});
    u = 0;
  } else {
    int j = 0;
    while (!in(x, path[j])) ++j;
    u = j - 1;
    raw.push_back({0, false, slice(0, u)});
  }
  int i = 1;
  for (;;) {
    int w = u + 1;
    while (w < k && !in(s, path[w])) ++w;
    if (w >= k) break;
    raw.push_back({i, i % 2 == 1, slice(u, w)});
    ++i;
    u = w;
    int j = u + 1;
    while (j < k && !in(x, path[j])) ++j;
    if (j >= k) break;
    raw.push_back({i, i % 2 == 1, slice(u, j - 1)});
    ++i;
    u = j - 1;
  }
  PathPiece last{-1, false, slice(u, k - 1)};
  last.hidden = std::any_of(last.nodes.begin(), last.nodes.end(), [&](int v) { return in(x, v); });
  raw.push_back(last);
  std::vector<PathPiece> out;
  for (auto& p : raw)
    if (p.nodes.size() > 1) out.push_back(std::move(p));
  if (out.empty()) out.push_back(raw.back());
  return out;
}

std::vector<int> juxtapose(const std::vector<PathPiece>& pieces) {
  std::vector<int> out;
  for (const auto& p : pieces)
    for (int v : p.nodes)
      if (out.empty() || out.back() != v) out.push_back(v);
  return out;
}

namespace {

struct Entry {
  std::vector<int> edges;
  Rational cost;
};
using Table = std::map<TippingPoint, Entry>;

void bag_matchings(const Instance& inst, const std::vector<int>& bag, std::vector<std::vector<int>>& out) {
  std::vector<char> used(inst.size(), 0);
  std::vector<int> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == bag.size()) {
      std::vector<int> sorted(cur);
      std::sort(sorted.begin(), sorted.end());
      out.push_back(sorted);
      return;
    }
    int b = bag[i];
    if (used[b]) {
      rec(i + 1);
      return;
    }
    used[b] = 1;
    rec(i + 1);
    for (int w : inst.prefs(b)) {
      if (used[w]) continue;
      used[w] = 1;
      cur.push_back(inst.edge_id(b, w));
      rec(i + 1);
      cur.pop_back();
      used[w] = 0;
    }
    used[b] = 0;
  };
  rec(0);
  std::sort(out.begin(), out.end());
}

std::vector<int> touching(const Instance& inst, const std::vector<int>& edges, const std::vector<int>& set) {
  std::vector<int> out;
  for (int e : edges) {
    const auto& ed = inst.edge(e);
    if (std::binary_search(set.begin(), set.end(), ed.u) || std::binary_search(set.begin(), set.end(), ed.v))
      out.push_back(e);
  }
  return out;
}

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> set_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> set_difference(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct Candidate {
  TippingPoint tp;
  Entry entry;
};

void update(Table& table, TippingPoint tp, Entry entry) {
  auto it = table.find(tp);
  if (it == table.end()) {
    table.emplace(std::move(tp), std::move(entry));
  } else if (entry.cost < it->second.cost) {
    it->second = std::move(entry);
  }
}

}  // namespace

std::optional<std::pair<Matching, Rational>> min_cost_popular_tw(const Instance& original,
                                                                 const DichotomicDecomposition& dtd,
                                                                 const DpOptions& opts, DpStats* stats) {
  validate(original, dtd.td);
  const int k = static_cast<int>(dtd.td.bags.size());
  if (static_cast<int>(dtd.successor.size()) != k || static_cast<int>(dtd.predecessors.size()) != k ||
      dtd.root < 0 || dtd.root >= k || dtd.successor[dtd.root] != -1)
    throw InputError("malformed dichotomic decomposition");
  for (int b = 0; b < k; ++b) {
    if (dtd.predecessors[b].size() > 2) throw InputError("bag with more than two predecessors");
    if (b != dtd.root && dtd.successor[b] < 0) throw InputError("bag without successor");
    for (int p : dtd.predecessors[b])
      if (dtd.successor[p] != b) throw InputError("predecessor and successor maps disagree");
  }
  const Instance inst = perturb_costs(original);
  DpStats local_stats;
  local_stats.bags = k;

  // Post-order.
  std::vector<int> order;
  {
    std::vector<std::pair<int, bool>> stack{{dtd.root, false}};
    while (!stack.empty()) {
      auto [b, done] = stack.back();
      stack.pop_back();
      if (done) {
        order.push_back(b);
        continue;
      }
      stack.push_back({b, true});
      for (int p : dtd.predecessors[b]) stack.push_back({p, false});
    }
  }
  if (static_cast<int>(order.size()) != k) throw InputError("bag tree is not connected");

  std::vector<std::vector<int>> subtree(k);
  std::vector<Table> tables(k);
  const auto& bags = dtd.td.bags;
  for (int b : order) {
    const auto& bag = bags[b];
    subtree[b] = bag;
    for (int p : dtd.predecessors[b]) subtree[b] = set_union(subtree[b], subtree[p]);
    std::vector<int> s = dtd.successor[b] >= 0 ? set_intersection(bag, bags[dtd.successor[b]]) : std::vector<int>{};
    std::vector<int> x = set_difference(subtree[b], s);
    const auto& preds = dtd.predecessors[b];

    std::vector<std::vector<int>> bms;
    bag_matchings(inst, bag, bms);

    // Children indexed by their S-matching.
    struct Child {
      std::vector<int> sep;
      std::map<std::vector<int>, std::vector<const std::pair<const TippingPoint, Entry>*>> by_key;
    };
    std::vector<Child> children;
    for (int p : preds) {
      Child c;
      c.sep = set_intersection(bag, bags[p]);
      for (const auto& kv : tables[p]) c.by_key[kv.first.s_matching].push_back(&kv);
      children.push_back(std::move(c));
    }

    auto evaluate = [&](const std::vector<int>& bm, std::vector<Candidate>& out, std::size_t& checks) {
      Matching mb = Matching::from_edges(inst, bm);
      if (children.empty()) {
        LocalView view = restricted_view(inst, mb, s, x);
        if (find_forbidden(view.graph)) return;
        TippingPoint tp{maximal_active(view), touching(inst, bm, s)};
        out.push_back({std::move(tp), Entry{bm, cost_of(inst, mb)}});
        return;
      }
      std::vector<const std::vector<const std::pair<const TippingPoint, Entry>*>*> lists;
      for (const auto& c : children) {
        auto it = c.by_key.find(touching(inst, bm, c.sep));
        if (it == c.by_key.end()) return;
        lists.push_back(&it->second);
      }
      static const std::vector<Configuration> only_empty{Configuration{}};
      static const std::vector<const std::pair<const TippingPoint, Entry>*> none{nullptr};
      const auto& l1 = *lists[0];
      const auto& l2 = lists.size() > 1 ? *lists[1] : none;
      for (const auto* e1 : l1)
        for (const auto* e2 : l2) {
          std::vector<int> star = set_union(bm, e1->second.edges);
          if (e2) star = set_union(star, e2->second.edges);
          const auto& max1 = e1->first.maximal;
          const auto& max2 = e2 ? e2->first.maximal : only_empty;
          Matching ms = Matching::from_edges(inst, star);
          Family family;
          bool popular = true;
          for (const auto& c1 : max1) {
            for (const auto& c2 : max2) {
              LocalView h = build_shortcut_graph(inst, bag, s, ms, c1, c2);
              if (find_forbidden(h.graph)) {
                popular = false;
                break;
              }
              active_family(h, family, 20'000'000);
            }
            if (!popular) break;
          }
          TippingPoint tp;
          if (popular) tp = TippingPoint{maximal_of(family), touching(inst, star, s)};
          if (opts.assert_internal && subtree[b].size() <= 12) {
            ++checks;
            LocalView direct = restricted_view(inst, ms, s, x);
            bool direct_popular = !find_forbidden(direct.graph);
            if (direct_popular != popular)
              throw std::logic_error("shortcut and direct local popularity disagree at bag " + std::to_string(b) +
                                     " for " + write_matching(original, ms));
            if (popular && maximal_active(direct) != tp.maximal)
              throw std::logic_error("shortcut and direct tipping points disagree at bag " + std::to_string(b) +
                                     " for " + write_matching(original, ms));
          }
          if (!popular) continue;
          out.push_back({std::move(tp), Entry{star, cost_of(inst, ms)}});
        }
    };

    int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(bms.size())));
    std::vector<std::vector<Candidate>> results(jobs);
    std::vector<std::size_t> checks(jobs, 0);
    if (jobs == 1) {
      for (const auto& bm : bms) evaluate(bm, results[0], checks[0]);
    } else {
      std::vector<std::exception_ptr> errors(jobs);
      std::vector<std::thread> pool;
      for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
          try {
            for (std::size_t i = t; i < bms.size(); i += jobs) evaluate(bms[i], results[t], checks[t]);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    Table& table = tables[b];
    for (auto& r : results)
      for (auto& c : r) {
        ++local_stats.candidates;
        update(table, std::move(c.tp), std::move(c.entry));
      }
    for (auto c : checks) local_stats.internal_checks += c;
    local_stats.max_table = std::max(local_stats.max_table, table.size());
    for (int p : preds) Table().swap(tables[p]);
    if (table.empty()) {
      if (stats) *stats = local_stats;
      return std::nullopt;
    }
  }
  if (stats) *stats = local_stats;
  const Table& root = tables[dtd.root];
  const Entry* best = nullptr;
  for (const auto& [tp, e] : root)
    if (!best || e.cost < best->cost) best = &e;
  Matching m = Matching::from_edges(original, best->edges);
  return std::make_pair(m, cost_of(original, m));
}

}  // namespace popmatch::tw
