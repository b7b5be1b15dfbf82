#include "popmatch/gadgets.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "popmatch/verify.hpp"

namespace popmatch::gadgets {

namespace {

std::string var(const char* base, int r) { return base + std::to_string(r); }
std::string cl(char base, int c, int t) { return std::string(1, base) + std::to_string(c) + "_" + std::to_string(t); }

// Tail entries sort by (clause, variable, name); level-1 nodes carry clause 0.
using TailKey = std::tuple<int, int, std::string>;

class Builder {
 public:
  void node(const std::string& name, Side side, int clause = 0, int variable = 0) {
    index_[name] = static_cast<int>(names_.size());
    names_.push_back(name);
    sides_.push_back(side);
    keys_.emplace_back(clause, variable, name);
    head_.emplace_back();
    tail_.emplace_back();
  }
  void head(const std::string& u, std::vector<std::string> list) { head_[index_.at(u)] = std::move(list); }
  // Edge that sits in the unordered tail of both endpoints.
  void tail_edge(const std::string& u, const std::string& v) {
    tail_[index_.at(u)].insert(keys_[index_.at(v)]);
    tail_[index_.at(v)].insert(keys_[index_.at(u)]);
  }

  std::vector<std::vector<std::string>> lists() const {
    const int n = static_cast<int>(names_.size());
    std::vector<std::set<TailKey>> tail = tail_;
    std::vector<std::set<std::string>> in_head(n);
    for (int u = 0; u < n; ++u) in_head[u].insert(head_[u].begin(), head_[u].end());
    for (int u = 0; u < n; ++u)
      for (const auto& v : head_[u]) {
        int vi = index_.at(v);
        if (!in_head[vi].count(names_[u])) tail[vi].insert(keys_[u]);
      }
    std::vector<std::vector<std::string>> out(n);
    for (int u = 0; u < n; ++u) {
      out[u] = head_[u];
      for (const auto& k : tail[u])
        if (!in_head[u].count(std::get<2>(k))) out[u].push_back(std::get<2>(k));
    }
    return out;
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Side>& sides() const { return sides_; }

 private:
  std::vector<std::string> names_;
  std::vector<Side> sides_;
  std::vector<TailKey> keys_;
  std::vector<std::vector<std::string>> head_;
  std::vector<std::set<TailKey>> tail_;
  std::unordered_map<std::string, int> index_;
};

void validate(const PositiveCnf& phi) {
  if (phi.num_vars < 0) throw InputError("negative variable count");
  for (std::size_t c = 0; c < phi.clauses.size(); ++c) {
    const auto& k = phi.clauses[c];
    for (int r : k)
      if (r < 1 || r > phi.num_vars)
        throw InputError("clause " + std::to_string(c + 1) + ": variable " + std::to_string(r) + " out of range");
    if (k[0] == k[1] || k[0] == k[2] || k[1] == k[2])
      throw InputError("clause " + std::to_string(c + 1) + " repeats a variable");
  }
}

struct Lists {
  std::vector<std::string> names;
  std::vector<Side> sides;
  std::vector<std::vector<std::string>> prefs;
};

Lists base_lists(const PositiveCnf& phi) {
  validate(phi);
  const int n0 = phi.num_vars;
  const int k = static_cast<int>(phi.clauses.size());
  Builder b;
  b.node("a0", Side::A);
  b.node("b0", Side::B);
  b.node("z", Side::B);
  b.node("z'", Side::A);
  for (int r = 1; r <= n0; ++r) {
    b.node(var("x", r), Side::A, 0, r);
    b.node(var("x'", r), Side::A, 0, r);
    b.node(var("y", r), Side::B, 0, r);
    b.node(var("y'", r), Side::B, 0, r);
  }
  for (int c = 1; c <= k; ++c) {
    for (int t = 1; t <= 6; ++t) b.node(cl('a', c, t), Side::A, c);
    for (int t = 1; t <= 6; ++t) b.node(cl('b', c, t), Side::B, c);
    for (int t = 0; t <= 8; ++t) b.node(cl('p', c, t), Side::A, c);
    for (int t = 0; t <= 8; ++t) b.node(cl('q', c, t), Side::B, c);
    for (int t = 0; t <= 3; ++t) b.node(cl('s', c, t), Side::A, c);
    for (int t = 0; t <= 3; ++t) b.node(cl('t', c, t), Side::B, c);
  }

  b.head("a0", {"b0", "z"});
  b.head("b0", {"a0", "z'"});
  std::vector<std::string> z, zp;
  for (int r = 1; r <= n0; ++r) z.push_back(var("x", r)), zp.push_back(var("y", r));
  for (int c = 1; c <= k; ++c)
    for (int g = 0; g < 3; ++g) z.push_back(cl('p', c, 3 * g + 1)), zp.push_back(cl('q', c, 3 * g));
  z.push_back("a0");
  zp.push_back("b0");
  for (int c = 1; c <= k; ++c)
    for (int g = 0; g < 3; ++g) z.push_back(cl('a', c, 2 * g + 1)), zp.push_back(cl('b', c, 2 * g + 1));
  b.head("z", z);
  b.head("z'", zp);

  for (int r = 1; r <= n0; ++r) {
    std::string x = var("x", r), xp = var("x'", r), y = var("y", r), yp = var("y'", r);
    b.head(x, {y, yp, "z"});
    b.head(xp, {y, yp});
    b.head(y, {x, xp, "z'"});
    b.head(yp, {x, xp});
  }

  for (int c = 1; c <= k; ++c) {
    const auto& v = phi.clauses[c - 1];
    // Gadget g refers to the variables at positions g+1 and g+2 (mod 3).
    for (int g = 0; g < 3; ++g) {
      int ra = v[(g + 1) % 3], rb = v[(g + 2) % 3];
      std::string a1 = cl('a', c, 2 * g + 1), a2 = cl('a', c, 2 * g + 2);
      std::string b1 = cl('b', c, 2 * g + 1), b2 = cl('b', c, 2 * g + 2);
      b.head(a1, {b1, var("y'", ra), b2, "z"});
      b.head(b1, {a2, var("x'", rb), a1, "z'"});
      b.head(a2, {b2, b1});
      b.head(b2, {a1, a2});
    }
    for (int g = 0; g < 3; ++g) {
      int rp = v[(g + 1) % 3], rq = v[(g + 2) % 3];
      auto p = [&](int i) { return cl('p', c, 3 * g + i); };
      auto q = [&](int i) { return cl('q', c, 3 * g + i); };
      std::vector<std::string> q0{p(0), p(2), "z'"};
      if (g != 2) q0.push_back(cl('s', c, 0));
      std::vector<std::string> p1{q(1), q(2), "z"};
      if (g != 0) p1.push_back(cl('t', c, 0));
      b.head(p(0), {q(0), q(2)});
      b.head(q(0), q0);
      b.head(p(1), p1);
      b.head(q(1), {p(1), p(2)});
      b.head(p(2), {q(0), var("y", rp), q(1), q(2)});
      b.head(q(2), {p(1), var("x", rq), p(0), p(2)});
    }
    b.head(cl('s', c, 0), {cl('t', c, 1), cl('q', c, 0), cl('t', c, 2), cl('q', c, 3), cl('t', c, 3)});
    b.head(cl('t', c, 0), {cl('s', c, 3), cl('p', c, 7), cl('s', c, 2), cl('p', c, 4), cl('s', c, 1)});
    for (int m = 1; m <= 3; ++m) {
      b.head(cl('s', c, m), {cl('t', c, m), cl('t', c, 0)});
      b.head(cl('t', c, m), {cl('s', c, m), cl('s', c, 0)});
    }
  }
  for (int c = 1; c <= k; ++c) {
    for (int r = 1; r <= n0; ++r) {
      b.tail_edge(cl('s', c, 0), var("y'", r));
      b.tail_edge(cl('t', c, 0), var("x'", r));
    }
    for (int d = 1; d <= k; ++d)
      for (int g = 0; g < 3; ++g) {
        b.tail_edge(cl('s', c, 0), cl('q', d, 3 * g + 2));
        b.tail_edge(cl('t', c, 0), cl('p', d, 3 * g + 2));
      }
  }
  return {b.names(), b.sides(), b.lists()};
}

int position(const std::vector<std::string>& names, const std::string& name) {
  return static_cast<int>(std::find(names.begin(), names.end(), name) - names.begin());
}

void add_x0(const PositiveCnf& phi, Lists& l) {
  const int k = static_cast<int>(phi.clauses.size());
  std::vector<std::string> xp{"y0", "y'0"}, yp{"x0", "x'0"};
  for (int c = 1; c <= k; ++c) {
    xp.push_back(cl('t', c, 0));
    yp.push_back(cl('s', c, 0));
    l.prefs[position(l.names, cl('s', c, 0))].push_back("y'0");
    l.prefs[position(l.names, cl('t', c, 0))].push_back("x'0");
  }
  l.names.insert(l.names.end(), {"x0", "x'0", "y0", "y'0"});
  l.sides.insert(l.sides.end(), {Side::A, Side::A, Side::B, Side::B});
  l.prefs.push_back({"y0", "y'0"});
  l.prefs.push_back(xp);
  l.prefs.push_back({"x0", "x'0"});
  l.prefs.push_back(yp);
}

// Level of a neighbor of z or z' in the merged list: 1, 2, a0/b0 (3) or 0 (4).
int merge_group(const std::string& name) {
  if (name == "a0" || name == "b0") return 3;
  char h = name[0];
  if (h == 'x' || h == 'y') return 1;
  if (h == 'p' || h == 'q') return 2;
  return 4;
}

void merge_z(Lists& l) {
  int z = position(l.names, "z"), zp = position(l.names, "z'");
  std::vector<std::string> merged;
  for (int group = 1; group <= 4; ++group) {
    for (const auto& v : l.prefs[z])
      if (merge_group(v) == group) merged.push_back(v);
    for (const auto& v : l.prefs[zp])
      if (merge_group(v) == group) merged.push_back(v);
  }
  l.prefs[z] = merged;
  for (auto& list : l.prefs)
    for (auto& v : list)
      if (v == "z'") v = "z";
  l.names.erase(l.names.begin() + zp);
  l.sides.erase(l.sides.begin() + zp);
  l.prefs.erase(l.prefs.begin() + zp);
}

void add_d(Lists& l) {
  std::vector<std::string> d0{"d1", "d2", "d3"};
  for (std::size_t u = 0; u < l.names.size(); ++u) {
    if (l.names[u] == "z") continue;
    d0.push_back(l.names[u]);
    l.prefs[u].push_back("d0");
  }
  l.names.insert(l.names.end(), {"d0", "d1", "d2", "d3"});
  l.prefs.push_back(d0);
  l.prefs.push_back({"d2", "d3", "d0"});
  l.prefs.push_back({"d3", "d1", "d0"});
  l.prefs.push_back({"d1", "d2", "d0"});
}

class Named {
 public:
  explicit Named(const Instance& inst) : inst_(inst) {}
  void match(const std::string& u, const std::string& v) {
    pairs_.emplace_back(inst_.index_of(u), inst_.index_of(v));
  }
  void alpha(const std::string& u, int value) { alpha_[inst_.index_of(u)] = value; }
  Matching matching() const { return Matching::from_pairs(inst_, pairs_); }
  Witness witness() const {
    Witness w{std::vector<Rational>(inst_.size(), Rational(0))};
    for (const auto& [u, a] : alpha_) w.alpha[u] = a;
    return w;
  }

 private:
  const Instance& inst_;
  std::vector<std::pair<int, int>> pairs_;
  std::map<int, int> alpha_;
};

// Level-2 pairings inside gadget g of clause c.
// Crossed: (p0,q2),(p1,q1),(p2,q0), the pairing of the dominant exemplar.
// Switched: (p0,q0),(p1,q2),(p2,q1).
void level2_crossed(Named& nm, int c, int g, bool with_alpha) {
  auto p = [&](int i) { return cl('p', c, 3 * g + i); };
  auto q = [&](int i) { return cl('q', c, 3 * g + i); };
  nm.match(p(0), q(2));
  nm.match(p(1), q(1));
  nm.match(p(2), q(0));
  if (!with_alpha) return;
  for (auto u : {p(0), q(0), p(1)}) nm.alpha(u, 1);
  for (auto u : {q(1), p(2), q(2)}) nm.alpha(u, -1);
}

void level2_switched(Named& nm, int c, int g) {
  auto p = [&](int i) { return cl('p', c, 3 * g + i); };
  auto q = [&](int i) { return cl('q', c, 3 * g + i); };
  nm.match(p(0), q(0));
  nm.match(p(1), q(2));
  nm.match(p(2), q(1));
  for (auto u : {q(0), p(1), q(1)}) nm.alpha(u, 1);
  for (auto u : {p(0), p(2), q(2)}) nm.alpha(u, -1);
}

void level2_plain(Named& nm, int c, int g) {
  for (int i = 0; i < 3; ++i) nm.match(cl('p', c, 3 * g + i), cl('q', c, 3 * g + i));
}

void level0(Named& nm, int c, int g, bool crossed) {
  std::string a1 = cl('a', c, 2 * g + 1), a2 = cl('a', c, 2 * g + 2);
  std::string b1 = cl('b', c, 2 * g + 1), b2 = cl('b', c, 2 * g + 2);
  if (crossed) {
    nm.match(a1, b2);
    nm.match(a2, b1);
  } else {
    nm.match(a1, b1);
    nm.match(a2, b2);
  }
}

}  // namespace

PositiveCnf parse_cnf(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool header = false;
  int declared = 0;
  PositiveCnf phi;
  std::vector<int> pending;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c" || tok[0] == '%') continue;
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    if (tok == "p") {
      std::string fmt;
      if (header || !(ls >> fmt >> phi.num_vars >> declared) || fmt != "cnf" || phi.num_vars < 0 || declared < 0)
        throw InputError(where() + "bad header, expected 'p cnf <vars> <clauses>'");
      header = true;
      continue;
    }
    if (!header) throw InputError(where() + "clause before 'p cnf' header");
    do {
      long lit;
      try {
        std::size_t used;
        lit = std::stol(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InputError(where() + "bad literal '" + tok + "'");
      }
      if (lit < 0) throw InputError(where() + "negated literal " + tok);
      if (lit == 0) {
        if (pending.size() != 3) throw InputError(where() + "clause must have exactly 3 literals");
        std::array<int, 3> k{pending[0], pending[1], pending[2]};
        if (k[0] == k[1] || k[0] == k[2] || k[1] == k[2])
          throw InputError(where() + "repeated variable within a clause");
        phi.clauses.push_back(k);
        pending.clear();
        continue;
      }
      if (lit > phi.num_vars) throw InputError(where() + "variable " + tok + " out of range");
      pending.push_back(static_cast<int>(lit));
    } while (ls >> tok);
  }
  if (!header) throw InputError("missing 'p cnf' header");
  if (!pending.empty()) throw InputError("last clause not terminated by 0");
  if (static_cast<int>(phi.clauses.size()) != declared)
    throw InputError("header declares " + std::to_string(declared) + " clauses, found " +
                     std::to_string(phi.clauses.size()));
  return phi;
}

Assignment parse_assignment(const PositiveCnf& phi, std::string_view text) {
  Assignment a{std::vector<bool>(phi.num_vars, false)};
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    int r;
    try {
      std::size_t used;
      r = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("bad variable '" + tok + "' in assignment");
    }
    if (r < 1 || r > phi.num_vars) throw InputError("variable " + tok + " out of range");
    a.value[r - 1] = true;
  }
  return a;
}

std::string write_assignment(const Assignment& a) {
  std::string out;
  for (std::size_t r = 1; r <= a.value.size(); ++r)
    out += "var " + std::to_string(r) + ": " + (a.value[r - 1] ? "true" : "false") + "\n";
  return out;
}

void check_one_in_three(const PositiveCnf& phi, const Assignment& a) {
  if (static_cast<int>(a.value.size()) != phi.num_vars) throw InputError("assignment has the wrong number of variables");
  for (std::size_t c = 0; c < phi.clauses.size(); ++c) {
    int count = 0;
    for (int r : phi.clauses[c]) count += a[r];
    if (count != 1)
      throw InputError("clause " + std::to_string(c + 1) + " has " + std::to_string(count) + " true variables");
  }
}

std::vector<Assignment> one_in_three_assignments(const PositiveCnf& phi) {
  validate(phi);
  if (phi.num_vars > 20) throw BudgetExceeded("too many variables to enumerate assignments");
  std::vector<Assignment> out;
  for (long mask = 0; mask < (1L << phi.num_vars); ++mask) {
    Assignment a{std::vector<bool>(phi.num_vars)};
    for (int r = 0; r < phi.num_vars; ++r) a.value[r] = mask >> (phi.num_vars - 1 - r) & 1;
    bool ok = true;
    for (const auto& k : phi.clauses) ok = ok && a[k[0]] + a[k[1]] + a[k[2]] == 1;
    if (ok) out.push_back(a);
  }
  return out;
}

Variant parse_variant(std::string_view s) {
  if (s == "g") return Variant::G;
  if (s == "g0") return Variant::G0;
  if (s == "gprime") return Variant::Gprime;
  if (s == "h") return Variant::H;
  throw InputError("unknown variant '" + std::string(s) + "' (expected g, g0, gprime or h)");
}

Instance build_gadget(const PositiveCnf& phi, Variant variant) {
  Lists l = base_lists(phi);
  if (variant == Variant::G0) add_x0(phi, l);
  if (variant == Variant::Gprime || variant == Variant::H) merge_z(l);
  if (variant == Variant::H) add_d(l);
  bool bip = variant == Variant::G || variant == Variant::G0;
  return Instance::make(bip ? Kind::bipartite : Kind::roommates, l.names, l.sides, l.prefs);
}

Exemplars exemplar_matchings(const PositiveCnf& phi) {
  Instance g = build_gadget(phi, Variant::G);
  const int k = static_cast<int>(phi.clauses.size());
  Exemplars ex;
  for (bool women : {false, true}) {
    Named nm(g);
    nm.match("a0", "b0");
    for (int r = 1; r <= phi.num_vars; ++r) {
      nm.match(var("x", r), var("y", r));
      nm.match(var("x'", r), var("y'", r));
    }
    for (int c = 1; c <= k; ++c) {
      for (int gi = 0; gi < 3; ++gi) level0(nm, c, gi, women);
      for (int gi = 0; gi < 3; ++gi) level2_plain(nm, c, gi);
      for (int m = 1; m <= 3; ++m) nm.match(cl('s', c, m), cl('t', c, m));
    }
    (women ? ex.s_prime : ex.s) = nm.matching();
  }

  Named nm(g);
  nm.match("a0", "z");
  nm.match("z'", "b0");
  nm.alpha("a0", 1);
  nm.alpha("b0", 1);
  nm.alpha("z", -1);
  nm.alpha("z'", -1);
  for (int r = 1; r <= phi.num_vars; ++r) {
    nm.match(var("x", r), var("y'", r));
    nm.match(var("x'", r), var("y", r));
    nm.alpha(var("x", r), 1);
    nm.alpha(var("y", r), 1);
    nm.alpha(var("x'", r), -1);
    nm.alpha(var("y'", r), -1);
  }
  for (int c = 1; c <= k; ++c) {
    for (int gi = 0; gi < 3; ++gi) level0(nm, c, gi, true);
    for (int t = 1; t <= 6; ++t) {
      nm.alpha(cl('a', c, t), 1);
      nm.alpha(cl('b', c, t), -1);
    }
    for (int gi = 0; gi < 3; ++gi) level2_crossed(nm, c, gi, true);
    nm.match(cl('s', c, 0), cl('t', c, 1));
    nm.match(cl('s', c, 1), cl('t', c, 0));
    nm.match(cl('s', c, 2), cl('t', c, 2));
    nm.match(cl('s', c, 3), cl('t', c, 3));
    for (auto u : {cl('s', c, 1), cl('t', c, 1), cl('s', c, 2), cl('s', c, 3)}) nm.alpha(u, 1);
    for (auto u : {cl('s', c, 0), cl('t', c, 0), cl('t', c, 2), cl('t', c, 3)}) nm.alpha(u, -1);
  }
  ex.m_star = nm.matching();
  ex.m_star_witness = nm.witness();
  return ex;
}

std::pair<Matching, Witness> assignment_to_matching(const PositiveCnf& phi, const Assignment& a) {
  validate(phi);
  check_one_in_three(phi, a);
  Instance g = build_gadget(phi, Variant::G);
  Named nm(g);
  nm.match("a0", "b0");
  for (int r = 1; r <= phi.num_vars; ++r) {
    if (a[r]) {
      nm.match(var("x", r), var("y'", r));
      nm.match(var("x'", r), var("y", r));
      nm.alpha(var("x", r), 1);
      nm.alpha(var("y", r), 1);
      nm.alpha(var("x'", r), -1);
      nm.alpha(var("y'", r), -1);
    } else {
      nm.match(var("x", r), var("y", r));
      nm.match(var("x'", r), var("y'", r));
    }
  }
  const int k = static_cast<int>(phi.clauses.size());
  for (int c = 1; c <= k; ++c) {
    const auto& v = phi.clauses[c - 1];
    int truth = 0;
    while (!a[v[truth]]) ++truth;
    // Gadget g of levels 0 and 2 reaches the variables at positions g+1 (a/p side) and g+2 (b/q side).
    //   level 0: crossed when its b side reaches the true variable, else identity;
    //   level 2: gadget `truth` keeps the stable pairing with zero alpha; the gadget whose p side
    //            reaches the true variable is switched, the one whose q side reaches it is crossed;
    //   level 3: s0 pairs with t_{truth+1}, and t0 with s_{truth+1}.
    for (int gi = 0; gi < 3; ++gi) level0(nm, c, gi, (gi + 2) % 3 == truth);
    for (int gi = 0; gi < 3; ++gi) {
      if (gi == truth)
        level2_plain(nm, c, gi);
      else if ((gi + 1) % 3 == truth)
        level2_switched(nm, c, gi);
      else
        level2_crossed(nm, c, gi, true);
    }
    int hit = truth + 1;
    nm.match(cl('s', c, 0), cl('t', c, hit));
    nm.match(cl('s', c, hit), cl('t', c, 0));
    nm.alpha(cl('s', c, 0), -1);
    nm.alpha(cl('t', c, 0), -1);
    nm.alpha(cl('s', c, hit), 1);
    nm.alpha(cl('t', c, hit), 1);
    for (int m = 1; m <= 3; ++m) {
      if (m == hit) continue;
      nm.match(cl('s', c, m), cl('t', c, m));
      // s0 prefers t_m to its partner when m < hit; t0 prefers s_m when m > hit.
      nm.alpha(cl('t', c, m), m < hit ? 1 : -1);
      nm.alpha(cl('s', c, m), m < hit ? -1 : 1);
    }
  }
  return {nm.matching(), nm.witness()};
}

Assignment matching_to_assignment(const PositiveCnf& phi, const Matching& m) {
  Instance g = build_gadget(phi, Variant::G);
  if (m.node_count() != g.size()) throw InputError("matching does not belong to the G instance");
  for (int u = 0; u < g.size(); ++u) {
    bool exposed_ok = g.name(u) == "z" || g.name(u) == "z'";
    if (m.matched(u) == exposed_ok)
      throw InputError("matching must leave exactly z and z' unmatched (" + g.name(u) +
                       (exposed_ok ? " is matched)" : " is unmatched)"));
  }
  auto cert = verify::is_popular_structural(g, m);
  if (!cert.verdict) throw InputError("matching is not popular");
  Assignment a{std::vector<bool>(phi.num_vars)};
  for (int r = 1; r <= phi.num_vars; ++r) {
    int e = g.edge_id(g.index_of(var("x", r)), g.index_of(var("y'", r)));
    a.value[r - 1] = m.contains(e);
  }
  try {
    check_one_in_three(phi, a);
  } catch (const InputError& err) {
    throw std::logic_error(std::string("popular matching decoded to a non 1-in-3 assignment: ") + err.what());
  }
  return a;
}

Matching lift_matching(const PositiveCnf& phi, const Matching& on_g, Variant target) {
  Instance g = build_gadget(phi, Variant::G);
  Instance t = build_gadget(phi, target);
  std::vector<std::pair<int, int>> pairs;
  for (int e : on_g.edges()) {
    std::string u = g.name(g.edge(e).u), v = g.name(g.edge(e).v);
    bool merged = target == Variant::Gprime || target == Variant::H;
    if (merged && (u == "z" || u == "z'" || v == "z" || v == "z'"))
      throw InputError("matching uses z or z', which are merged in this variant");
    pairs.emplace_back(t.index_of(u), t.index_of(v));
  }
  auto add = [&](const char* u, const char* v) { pairs.emplace_back(t.index_of(u), t.index_of(v)); };
  if (target == Variant::G0) {
    add("x0", "y'0");
    add("x'0", "y0");
  }
  if (target == Variant::H) {
    add("d0", "d1");
    add("d2", "d3");
  }
  return Matching::from_pairs(t, pairs);
}

ForcedFixture forced_fixture(const PositiveCnf& phi, int regime) {
  if (regime < 1 || regime > 6) throw InputError("regime must be 1..6");
  bool needs_clause = regime == 4 || regime == 6;
  if (needs_clause && phi.clauses.empty()) throw InputError("regime needs at least one clause");
  Variant v = regime == 4 || regime == 6 ? Variant::G : Variant::G0;
  ForcedFixture f{v, build_gadget(phi, v), {}, {}, {}, {}};
  const Instance& in = f.inst;
  auto edge = [&](const char* a, const char* b) { return in.edge_id(in.index_of(a), in.index_of(b)); };
  std::string s0 = needs_clause ? cl('s', 1, 0) : "";
  switch (regime) {
    case 1:
      f.e0 = {edge("a0", "z"), edge("x0", "y0")};
      break;
    case 2:
      f.e1 = {edge("a0", "b0"), edge("x0", "y'0")};
      break;
    case 3:
      f.e0 = {edge("a0", "z")};
      f.e1 = {edge("x0", "y'0")};
      break;
    case 4:
      f.u0 = {in.index_of("z")};
      f.u1 = {in.index_of(s0)};
      break;
    case 5:
      f.u0 = {in.index_of("z")};
      f.e0 = {edge("x0", "y0")};
      break;
    case 6:
      f.u1 = {in.index_of(s0)};
      f.e1 = {edge("a0", "b0")};
      break;
  }
  for (auto* set : {&f.e0, &f.e1}) std::sort(set->begin(), set->end());
  return f;
}

}  // namespace popmatch::gadgets
