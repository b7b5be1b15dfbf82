#include "popmatch/core.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace popmatch {

namespace {

std::uint64_t pair_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::string_view strip_comment(std::string_view line) {
  auto h = line.find('#');
  return h == std::string_view::npos ? line : line.substr(0, h);
}

[[noreturn]] void fail_at(std::size_t line, const std::string& msg) {
  throw InputError("line " + std::to_string(line) + ": " + msg);
}

}  // namespace

Instance Instance::make(Kind kind, std::vector<std::string> names, std::vector<Side> sides,
                        std::vector<std::vector<std::string>> prefs,
                        const std::vector<std::tuple<std::string, std::string, Rational>>& costs) {
  Instance inst;
  inst.kind_ = kind;
  inst.names_ = std::move(names);
  const int n = inst.size();
  if (kind == Kind::bipartite && static_cast<int>(sides.size()) != n)
    throw InputError("bipartite instance needs a side for every node");
  inst.sides_ = kind == Kind::bipartite ? std::move(sides) : std::vector<Side>(n, Side::A);
  for (int u = 0; u < n; ++u) {
    if (inst.names_[u].empty()) throw InputError("empty node id");
    if (!inst.index_.emplace(inst.names_[u], u).second)
      throw InputError("duplicate node id " + inst.names_[u]);
  }
  prefs.resize(n);
  inst.prefs_.assign(n, {});
  inst.rank_.assign(n, {});
  for (int u = 0; u < n; ++u) {
    for (const auto& vn : prefs[u]) {
      int v = inst.index_of(vn);
      if (v == u) throw InputError("node " + inst.names_[u] + " lists itself");
      if (!inst.rank_[u].emplace(v, static_cast<int>(inst.prefs_[u].size())).second)
        throw InputError("node " + inst.names_[u] + " lists " + vn + " twice");
      inst.prefs_[u].push_back(v);
    }
  }
  for (int u = 0; u < n; ++u) {
    for (int v : inst.prefs_[u]) {
      if (!inst.rank_[v].count(u))
        throw InputError("preferences not mutual: " + inst.names_[u] + " lists " + inst.names_[v] +
                         " but not conversely");
      if (kind == Kind::bipartite && inst.sides_[u] == inst.sides_[v])
        throw InputError("edge " + inst.names_[u] + "-" + inst.names_[v] + " inside one side");
    }
  }
  for (int u = 0; u < n; ++u)
    for (int v : inst.prefs_[u])
      if (inst.names_[u] < inst.names_[v]) inst.edges_.push_back({u, v});
  std::sort(inst.edges_.begin(), inst.edges_.end(), [&](const Edge& a, const Edge& b) {
    const auto& an = inst.names_;
    if (an[a.u] != an[b.u]) return an[a.u] < an[b.u];
    return an[a.v] < an[b.v];
  });
  for (int e = 0; e < inst.edge_count(); ++e)
    inst.edge_index_[pair_key(inst.edges_[e].u, inst.edges_[e].v)] = e;
  inst.costs_.assign(inst.edges_.size(), Rational(0));
  for (const auto& [a, b, c] : costs) {
    int e = inst.edge_id(inst.index_of(a), inst.index_of(b));
    if (e < 0) throw InputError("cost on non-edge " + a + "-" + b);
    inst.costs_[e] = c;
  }
  inst.incident_.assign(n, {});
  for (int u = 0; u < n; ++u)
    for (int v : inst.prefs_[u]) inst.incident_[u].push_back(inst.edge_id(u, v));
  return inst;
}

int Instance::rank(int u, int v) const {
  auto it = rank_[u].find(v);
  return it == rank_[u].end() ? -1 : it->second;
}

int Instance::edge_id(int u, int v) const {
  auto it = edge_index_.find(pair_key(u, v));
  return it == edge_index_.end() ? -1 : it->second;
}

int Instance::index_of(std::string_view name) const {
  auto r = find(name);
  if (!r) throw InputError("unknown node " + std::string(name));
  return *r;
}

std::optional<int> Instance::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Instance Instance::with_costs(std::vector<Rational> costs) const {
  if (costs.size() != edges_.size()) throw InputError("cost vector size mismatch");
  Instance out = *this;
  out.costs_ = std::move(costs);
  return out;
}

Matching::Matching(const Instance& inst) : partner_(inst.size(), -1) {}

Matching Matching::from_edges(const Instance& inst, const std::vector<int>& edge_ids) {
  Matching m(inst);
  for (int e : edge_ids) {
    if (e < 0 || e >= inst.edge_count()) throw InputError("matching uses a non-edge");
    const Edge& ed = inst.edge(e);
    if (m.partner_[ed.u] >= 0 || m.partner_[ed.v] >= 0)
      throw InputError("matching edges overlap at " +
                       inst.name(m.partner_[ed.u] >= 0 ? ed.u : ed.v));
    m.partner_[ed.u] = ed.v;
    m.partner_[ed.v] = ed.u;
    m.edges_.push_back(e);
  }
  std::sort(m.edges_.begin(), m.edges_.end());
  return m;
}

Matching Matching::from_pairs(const Instance& inst, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> ids;
  for (auto [u, v] : pairs) {
    int e = inst.edge_id(u, v);
    if (e < 0) throw InputError("matching uses non-edge " + inst.name(u) + "-" + inst.name(v));
    ids.push_back(e);
  }
  return from_edges(inst, ids);
}

bool Matching::contains(int e) const {
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

const char* label_name(EdgeLabel l) {
  switch (l) {
    case EdgeLabel::PlusPlus: return "(+,+)";
    case EdgeLabel::PlusMinus: return "(+,-)";
    case EdgeLabel::MinusPlus: return "(-,+)";
    case EdgeLabel::MinusMinus: return "(-,-)";
    case EdgeLabel::Matched: return "matched";
  }
  return "?";
}

int vote(const Instance& inst, const Matching& m, int u, int v) {
  int p = m.partner(u);
  if (p < 0) return 1;
  return inst.rank(u, v) < inst.rank(u, p) ? 1 : -1;
}

EdgeLabel label_of(const Instance& inst, const Matching& m, int e) {
  if (m.contains(e)) return EdgeLabel::Matched;
  const Edge& ed = inst.edge(e);
  bool a = vote(inst, m, ed.u, ed.v) > 0;
  bool b = vote(inst, m, ed.v, ed.u) > 0;
  if (a && b) return EdgeLabel::PlusPlus;
  if (a) return EdgeLabel::PlusMinus;
  if (b) return EdgeLabel::MinusPlus;
  return EdgeLabel::MinusMinus;
}

LabeledGraph label_edges(const Instance& inst, const Matching& m) {
  if (m.node_count() != inst.size()) throw InputError("matching does not belong to this instance");
  LabeledGraph g;
  for (int e = 0; e < inst.edge_count(); ++e) {
    EdgeLabel l = label_of(inst, m, e);
    if (l == EdgeLabel::MinusMinus)
      g.removed.push_back(e);
    else
      g.kept.push_back({e, l});
  }
  g.exposed.resize(inst.size());
  for (int u = 0; u < inst.size(); ++u) g.exposed[u] = !m.matched(u);
  return g;
}

WeightSystem weight_system(const Instance& inst, const Matching& m) {
  if (m.node_count() != inst.size()) throw InputError("matching does not belong to this instance");
  WeightSystem w;
  w.edge.resize(inst.edge_count());
  for (int e = 0; e < inst.edge_count(); ++e) {
    switch (label_of(inst, m, e)) {
      case EdgeLabel::PlusPlus: w.edge[e] = 2; break;
      case EdgeLabel::MinusMinus: w.edge[e] = -2; break;
      default: w.edge[e] = 0;
    }
  }
  w.self.resize(inst.size());
  for (int u = 0; u < inst.size(); ++u) w.self[u] = m.matched(u) ? -1 : 0;
  return w;
}

int delta(const Instance& inst, const Matching& m, const Matching& n) {
  if (m.node_count() != inst.size() || n.node_count() != inst.size())
    throw InputError("matching does not belong to this instance");
  int d = 0;
  for (int u = 0; u < inst.size(); ++u) {
    int a = m.partner(u), b = n.partner(u);
    if (a == b) continue;
    if (a < 0) { --d; continue; }
    if (b < 0) { ++d; continue; }
    d += inst.rank(u, a) < inst.rank(u, b) ? 1 : -1;
  }
  return d;
}

int weight_of(const WeightSystem& w, const Instance& inst, const Matching& n) {
  int total = 0;
  for (int e : n.edges()) total += w.edge[e];
  for (int u = 0; u < inst.size(); ++u)
    if (!n.matched(u)) total += w.self[u];
  return total;
}

Rational cost_of(const Instance& inst, const Matching& m) {
  Rational c = 0;
  for (int e : m.edges()) c += inst.cost(e);
  return c;
}

bool is_stable(const Instance& inst, const Matching& m) {
  for (int e = 0; e < inst.edge_count(); ++e)
    if (label_of(inst, m, e) == EdgeLabel::PlusPlus) return false;
  return true;
}

Rational parse_rational(std::string_view s) {
  std::string str(s);
  if (str.empty()) throw InputError("empty rational");
  auto slash = str.find('/');
  auto digits = [](const std::string& t, bool sign) {
    std::size_t i = (sign && !t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::string num = str.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : str.substr(slash + 1);
  if (!digits(num, true) || !digits(den, false)) throw InputError("bad rational '" + str + "'");
  if (num[0] == '+') num.erase(0, 1);
  mpz_class d(den);
  if (d == 0) throw InputError("zero denominator in '" + str + "'");
  Rational r(mpz_class(num), d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_str();
}

Instance parse_instance(std::string_view text) {
  auto lines = lines_of(text);
  std::size_t ln = 0;
  std::optional<Kind> kind;
  std::vector<std::string> names;
  std::vector<Side> sides;
  std::unordered_map<std::string, int> idx;
  std::vector<std::vector<std::string>> prefs;
  std::vector<bool> has_pref;
  std::vector<std::tuple<std::string, std::string, Rational>> costs;
  std::set<std::pair<std::string, std::string>> cost_seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    ln = i + 1;
    auto tok = split_ws(strip_comment(lines[i]));
    if (tok.empty()) continue;
    if (!kind) {
      if (tok.size() != 3 || tok[0] != "popmatch" || tok[1] != "v1")
        fail_at(ln, "expected header 'popmatch v1 <bipartite|roommates>'");
      if (tok[2] == "bipartite")
        kind = Kind::bipartite;
      else if (tok[2] == "roommates")
        kind = Kind::roommates;
      else
        fail_at(ln, "unknown instance kind '" + std::string(tok[2]) + "'");
      continue;
    }
    if (tok[0] == "node") {
      bool bip = *kind == Kind::bipartite;
      if (tok.size() != (bip ? 3u : 2u))
        fail_at(ln, bip ? "expected 'node <id> A|B'" : "expected 'node <id>' (no side for roommates)");
      std::string id(tok[1]);
      if (id.find(':') != std::string::npos) fail_at(ln, "node id may not contain ':'");
      if (idx.count(id)) fail_at(ln, "duplicate node id " + id);
      idx[id] = static_cast<int>(names.size());
      names.push_back(id);
      prefs.emplace_back();
      has_pref.push_back(false);
      if (bip) {
        if (tok[2] == "A")
          sides.push_back(Side::A);
        else if (tok[2] == "B")
          sides.push_back(Side::B);
        else
          fail_at(ln, "side must be A or B");
      }
    } else if (tok[0] == "pref") {
      if (tok.size() < 2 || tok[1].empty() || tok[1].back() != ':')
        fail_at(ln, "expected 'pref <id>: <id> ...'");
      std::string id(tok[1].substr(0, tok[1].size() - 1));
      auto it = idx.find(id);
      if (it == idx.end()) fail_at(ln, "pref for undeclared node " + id);
      if (has_pref[it->second]) fail_at(ln, "second pref line for " + id);
      has_pref[it->second] = true;
      std::set<std::string> seen;
      for (std::size_t k = 2; k < tok.size(); ++k) {
        std::string v(tok[k]);
        if (!idx.count(v)) fail_at(ln, "unknown node " + v);
        if (v == id) fail_at(ln, "node lists itself");
        if (!seen.insert(v).second) fail_at(ln, "tie or duplicate entry " + v);
        prefs[it->second].push_back(v);
      }
    } else if (tok[0] == "cost") {
      if (tok.size() != 4 || tok[2].empty() || tok[2].back() != ':')
        fail_at(ln, "expected 'cost <id> <id>: <num>/<den>'");
      std::string a(tok[1]), b(tok[2].substr(0, tok[2].size() - 1));
      if (!idx.count(a) || !idx.count(b)) fail_at(ln, "cost on unknown node");
      auto key = std::minmax(a, b);
      if (!cost_seen.insert({key.first, key.second}).second) fail_at(ln, "duplicate cost line");
      try {
        costs.emplace_back(a, b, parse_rational(tok[3]));
      } catch (const InputError& e) {
        fail_at(ln, e.what());
      }
    } else {
      fail_at(ln, "unknown directive '" + std::string(tok[0]) + "'");
    }
  }
  if (!kind) throw InputError("line 1: missing header");
  // Mutuality and side errors carry the line of the offending pref entry.
  std::vector<std::size_t> pref_line(names.size(), 0);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tok = split_ws(strip_comment(lines[i]));
    if (tok.size() >= 2 && tok[0] == "pref" && tok[1].back() == ':') {
      auto it = idx.find(std::string(tok[1].substr(0, tok[1].size() - 1)));
      if (it != idx.end()) pref_line[it->second] = i + 1;
    }
  }
  for (std::size_t u = 0; u < names.size(); ++u) {
    for (const auto& v : prefs[u]) {
      int vi = idx[v];
      if (std::find(prefs[vi].begin(), prefs[vi].end(), names[u]) == prefs[vi].end())
        fail_at(pref_line[u], "preferences not mutual: " + names[u] + " lists " + v + " but " + v +
                                  " does not list " + names[u]);
      if (*kind == Kind::bipartite && sides[u] == sides[vi])
        fail_at(pref_line[u], "edge " + names[u] + "-" + v + " joins two nodes of one side");
    }
  }
  return Instance::make(*kind, std::move(names), std::move(sides), std::move(prefs), costs);
}

std::string write_instance(const Instance& inst) {
  std::ostringstream os;
  os << "popmatch v1 " << (inst.bipartite() ? "bipartite" : "roommates") << "\n";
  for (int u = 0; u < inst.size(); ++u) {
    os << "node " << inst.name(u);
    if (inst.bipartite()) os << (inst.side(u) == Side::A ? " A" : " B");
    os << "\n";
  }
  for (int u = 0; u < inst.size(); ++u) {
    os << "pref " << inst.name(u) << ":";
    for (int v : inst.prefs(u)) os << " " << inst.name(v);
    os << "\n";
  }
  for (int e = 0; e < inst.edge_count(); ++e) {
    if (inst.cost(e) == 0) continue;
    const Rational& c = inst.cost(e);
    os << "cost " << inst.name(inst.edge(e).u) << " " << inst.name(inst.edge(e).v) << ": "
       << c.get_num().get_str() << "/" << c.get_den().get_str() << "\n";
  }
  return os.str();
}

Matching parse_matching(const Instance& inst, std::string_view text) {
  auto lines = lines_of(text);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tok = split_ws(strip_comment(lines[i]));
    if (tok.empty()) continue;
    if (tok[0] != "match" || tok.size() != 3) fail_at(i + 1, "expected 'match <id> <id>'");
    auto a = inst.find(tok[1]), b = inst.find(tok[2]);
    if (!a || !b) fail_at(i + 1, "unknown node in matching");
    if (inst.edge_id(*a, *b) < 0) fail_at(i + 1, "not an edge: " + std::string(tok[1]) + "-" + std::string(tok[2]));
    pairs.emplace_back(*a, *b);
  }
  return Matching::from_pairs(inst, pairs);
}

std::string write_matching(const Instance& inst, const Matching& m) {
  std::ostringstream os;
  for (int e : m.edges())
    os << "match " << inst.name(inst.edge(e).u) << " " << inst.name(inst.edge(e).v) << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace popmatch
