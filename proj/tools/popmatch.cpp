#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "popmatch/dominant.hpp"
#include "popmatch/gadgets.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/stable.hpp"
#include "popmatch/treewidth.hpp"
#include "popmatch/verify.hpp"

using namespace popmatch;

namespace {

enum Exit { kYes = 0, kNo = 1, kInput = 2, kBudget = 3 };

struct Options {
  std::string instance, matching, witness, formula, td, output;
  std::string side = "A", variant = "g", assign, objective = "min-cost";
  std::string separator, component, e0, e1, u0, u1;
  int width_cap = 4;
  int jobs = 1;
  bool quiet = false;
  bool assert_internal = false;
  std::uint64_t seed = 0;
};

// Collects report lines; the last line printed is always "result: ...".
struct Report {
  std::ostringstream body;
  std::string result;
  int code = kYes;

  void line(const std::string& s) { body << s << "\n"; }
  void text(const std::string& s) { body << s; }
  int finish(int c, const std::string& r) {
    code = c;
    result = r;
    return c;
  }
};

std::string read_input(const std::string& path) {
  if (path.empty()) throw InputError("missing input file");
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return read_file(path);
}

Instance load_instance(const Options& o) { return parse_instance(read_input(o.instance)); }

Matching load_matching(const Instance& inst, const Options& o) {
  if (o.matching.empty()) throw InputError("missing --matching");
  return parse_matching(inst, read_file(o.matching));
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> node_list(const Instance& inst, const std::string& s) {
  std::vector<int> out;
  for (const auto& t : tokens(s)) out.push_back(inst.index_of(t));
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw InputError("node listed twice in " + s);
  return out;
}

// "a b, c d": pairs separated by commas.
std::vector<int> edge_list(const Instance& inst, const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto t = tokens(part);
    if (t.empty()) continue;
    if (t.size() != 2) throw InputError("expected two node ids per edge in '" + part + "'");
    int e = inst.edge_id(inst.index_of(t[0]), inst.index_of(t[1]));
    if (e < 0) throw InputError(t[0] + " " + t[1] + " is not an edge");
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string names(const Instance& inst, const std::vector<int>& nodes) {
  std::string s;
  for (int v : nodes) s += (s.empty() ? "" : " ") + inst.name(v);
  return s;
}

std::string edge_names(const Instance& inst, const std::vector<int>& edges) {
  std::string s;
  for (int e : edges) s += (s.empty() ? "" : ", ") + inst.name(inst.edge(e).u) + " " + inst.name(inst.edge(e).v);
  return s;
}

void violation(Report& r, const Instance& inst, const PopularityCertificate& c) {
  r.line(std::string("violation ") + violation_name(*c.kind) + ": " + names(inst, c.nodes));
}

// Writes to -o if given, otherwise into the report.
void artifact(Report& r, const Options& o, const std::string& text) {
  if (o.output.empty()) {
    r.text(text);
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw InputError("cannot write " + o.output);
  out << text;
  r.line("wrote " + o.output);
}

oracle::Budget budget() { return {}; }

// ---- check ----

int check_stable(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  for (int e = 0; e < inst.edge_count(); ++e)
    if (label_of(inst, m, e) == EdgeLabel::PlusPlus) {
      r.line("violation blocking-edge: " + inst.name(inst.edge(e).u) + " " + inst.name(inst.edge(e).v));
      return r.finish(kNo, "not-stable");
    }
  return r.finish(kYes, "stable");
}

int check_popular(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  auto c = verify::is_popular_structural(inst, m);
  if (!c.verdict) {
    violation(r, inst, c);
    return r.finish(kNo, "not-popular");
  }
  return r.finish(kYes, "popular");
}

int check_dominant(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  auto p = verify::is_popular_structural(inst, m);
  if (!p.verdict) {
    violation(r, inst, p);
    return r.finish(kNo, "not-dominant");
  }
  auto c = verify::is_dominant_structural(inst, m);
  if (!c.verdict) {
    violation(r, inst, c);
    return r.finish(kNo, "not-dominant");
  }
  return r.finish(kYes, "dominant");
}

int check_strongly_dominant(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  auto p = verify::is_strongly_dominant(inst, m);
  if (!p) {
    r.line("note: no partition (L, R) meets the strong dominance constraints");
    return r.finish(kNo, "not-strongly-dominant");
  }
  r.line("left: " + names(inst, p->left));
  r.line("right: " + names(inst, p->right));
  r.text(write_witness(inst, verify::partition_witness(inst, m, *p)));
  return r.finish(kYes, "strongly-dominant");
}

int check_locally_popular(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  auto c = tw::is_locally_popular(inst, node_list(inst, o.separator), node_list(inst, o.component), m);
  if (!c.verdict) {
    violation(r, inst, c);
    return r.finish(kNo, "not-locally-popular");
  }
  return r.finish(kYes, "locally-popular");
}

// ---- solve ----

int solve_stable(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  if (o.side != "A" && o.side != "B") throw InputError("--side must be A or B");
  Matching m = stable::gale_shapley(inst, o.side == "A" ? Side::A : Side::B);
  artifact(r, o, write_matching(inst, m));
  return r.finish(kYes, "stable size=" + std::to_string(m.size()));
}

int solve_roommates_stable(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  auto m = stable::irving(inst);
  if (!m) {
    r.line("note: the preference lists admit no stable matching");
    return r.finish(kNo, "none");
  }
  artifact(r, o, write_matching(inst, *m));
  return r.finish(kYes, "stable size=" + std::to_string(m->size()));
}

int solve_strongly_dominant(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  auto sd = dominant::strongly_dominant(inst);
  if (!sd) {
    r.line("note: the bidirected instance has no stable matching, so no strongly dominant matching exists");
    return r.finish(kNo, "none");
  }
  artifact(r, o, write_matching(inst, sd->first) + write_witness(inst, sd->second));
  return r.finish(kYes, "strongly-dominant size=" + std::to_string(sd->first.size()));
}

int solve_min_cost_popular(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  tw::TreeDecomposition td =
      o.td.empty() ? tw::find_tree_decomposition(inst, o.width_cap) : tw::parse_td(inst, read_file(o.td));
  tw::validate(inst, td);
  auto d = tw::make_dichotomic(td, td.root >= 0 ? td.root : 0);
  tw::DpStats stats;
  auto best = tw::min_cost_popular_tw(inst, d, {o.assert_internal, o.jobs}, &stats);
  r.line("width: " + std::to_string(td.width()));
  r.line("bags: " + std::to_string(stats.bags) + " max-table: " + std::to_string(stats.max_table));
  if (!best) {
    r.line("note: some bag has an empty leader table, so no popular matching exists");
    return r.finish(kNo, "none");
  }
  artifact(r, o, write_matching(inst, best->first));
  r.line("cost: " + to_string(best->second));
  return r.finish(kYes, "min-cost-popular cost=" + to_string(best->second));
}

int solve_approx(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  auto a = dominant::approx_max_weight_popular(inst, budget(), o.jobs);
  r.line("stable-cost: " + to_string(cost_of(inst, a.best_stable)));
  r.line("dominant-cost: " + to_string(cost_of(inst, a.best_dominant)));
  artifact(r, o, write_matching(inst, a.chosen));
  r.line("cost: " + to_string(a.cost));
  return r.finish(kYes, "approx-max-weight cost=" + to_string(a.cost));
}

// ---- witness ----

int witness_find(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  auto w = verify::find_witness(inst, m);
  if (!w) {
    auto c = verify::is_popular_structural(inst, m);
    if (!c.verdict) violation(r, inst, c);
    r.line("note: the witness LP is infeasible");
    return r.finish(kNo, "none");
  }
  artifact(r, o, write_witness(inst, *w));
  return r.finish(kYes, "witness");
}

int witness_find_unit(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  auto c = verify::is_popular_structural(inst, m);
  if (!c.verdict) {
    violation(r, inst, c);
    return r.finish(kNo, "none");
  }
  artifact(r, o, write_witness(inst, verify::find_unit_witness(inst, m)));
  return r.finish(kYes, "witness");
}

int witness_verify(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  Matching m = load_matching(inst, o);
  if (o.witness.empty()) throw InputError("missing --witness");
  Witness w = parse_witness(inst, read_file(o.witness));
  if (!verify::verify_witness(inst, m, w)) return r.finish(kNo, "invalid-witness");
  return r.finish(kYes, "valid-witness");
}

// ---- oracle ----

int oracle_classify(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  auto c = oracle::classify(inst, budget(), o.jobs);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < c.matchings.size(); ++i) {
    const auto& f = c.flags[i];
    std::string flags;
    auto add = [&](bool on, const char* name, std::size_t& n) {
      if (!on) return;
      flags += std::string(flags.empty() ? "" : " ") + name;
      ++n;
    };
    add(f.stable, "stable", counts[0]);
    add(f.popular, "popular", counts[1]);
    add(f.dominant, "dominant", counts[2]);
    add(f.strongly_dominant, "strongly-dominant", counts[3]);
    if (flags.empty()) continue;
    r.line("{" + edge_names(inst, c.matchings[i].edges()) + "} " + flags);
  }
  r.line("matchings: " + std::to_string(c.matchings.size()));
  return r.finish(kYes, "stable=" + std::to_string(counts[0]) + " popular=" + std::to_string(counts[1]) +
                            " dominant=" + std::to_string(counts[2]) +
                            " strongly-dominant=" + std::to_string(counts[3]));
}

int oracle_optimize(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  oracle::Objective obj;
  if (o.objective == "min-cost")
    obj = oracle::Objective::min_cost_popular;
  else if (o.objective == "max-weight")
    obj = oracle::Objective::max_weight_popular;
  else
    throw InputError("--objective must be min-cost or max-weight");
  auto best = oracle::optimize(inst, obj, budget(), o.jobs);
  if (!best) {
    r.line("note: the instance has no popular matching");
    return r.finish(kNo, "none");
  }
  artifact(r, o, write_matching(inst, best->first));
  r.line("cost: " + to_string(best->second));
  return r.finish(kYes, o.objective + " cost=" + to_string(best->second));
}

int oracle_pmffe(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  auto m = oracle::pmffe(inst, edge_list(inst, o.e0), edge_list(inst, o.e1), node_list(inst, o.u0),
                         node_list(inst, o.u1), budget(), o.jobs);
  if (!m) {
    r.line("note: no popular matching meets the forced and forbidden elements");
    return r.finish(kNo, "none");
  }
  artifact(r, o, write_matching(inst, *m));
  return r.finish(kYes, "found size=" + std::to_string(m->size()));
}

// ---- gadget ----

gadgets::PositiveCnf load_formula(const Options& o) {
  if (o.formula.empty()) throw InputError("missing --formula");
  return gadgets::parse_cnf(read_file(o.formula));
}

int gadget_build(Report& r, const Options& o) {
  auto phi = load_formula(o);
  Instance g = gadgets::build_gadget(phi, gadgets::parse_variant(o.variant));
  artifact(r, o, write_instance(g));
  return r.finish(kYes, "instance nodes=" + std::to_string(g.size()) + " edges=" + std::to_string(g.edge_count()));
}

int gadget_encode(Report& r, const Options& o) {
  auto phi = load_formula(o);
  auto a = gadgets::parse_assignment(phi, o.assign);
  gadgets::check_one_in_three(phi, a);
  auto [m, w] = gadgets::assignment_to_matching(phi, a);
  Instance g = gadgets::build_gadget(phi, gadgets::Variant::G);
  artifact(r, o, write_matching(g, m) + write_witness(g, w));
  return r.finish(kYes, "matching size=" + std::to_string(m.size()));
}

int gadget_decode(Report& r, const Options& o) {
  auto phi = load_formula(o);
  Instance g = gadgets::build_gadget(phi, gadgets::Variant::G);
  Matching m = load_matching(g, o);
  auto a = gadgets::matching_to_assignment(phi, m);
  r.text(gadgets::write_assignment(a));
  std::string trues;
  for (int v = 1; v <= phi.num_vars; ++v)
    if (a[v]) trues += (trues.empty() ? "" : ",") + std::to_string(v);
  return r.finish(kYes, "assignment true=" + (trues.empty() ? std::string("none") : trues));
}

int gadget_exemplars(Report& r, const Options& o) {
  auto phi = load_formula(o);
  Instance g = gadgets::build_gadget(phi, gadgets::Variant::G);
  auto ex = gadgets::exemplar_matchings(phi);
  std::string text = "# S\n" + write_matching(g, ex.s) + "# S'\n" + write_matching(g, ex.s_prime) + "# M*\n" +
                     write_matching(g, ex.m_star) + "# witness of M*\n" + write_witness(g, ex.m_star_witness);
  artifact(r, o, text);
  return r.finish(kYes, "exemplars");
}

// ---- treewidth ----

int treewidth_decompose(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  auto td = tw::find_tree_decomposition(inst, o.width_cap);
  artifact(r, o, tw::write_td(inst, td));
  return r.finish(kYes, "width=" + std::to_string(td.width()) + " bags=" + std::to_string(td.bags.size()));
}

int treewidth_dichotomic(Report& r, const Options& o) {
  Instance inst = load_instance(o);
  tw::TreeDecomposition td =
      o.td.empty() ? tw::find_tree_decomposition(inst, o.width_cap) : tw::parse_td(inst, read_file(o.td));
  tw::validate(inst, td);
  auto d = tw::make_dichotomic(td, td.root >= 0 ? td.root : 0);
  artifact(r, o, tw::write_dichotomic(inst, d));
  return r.finish(kYes, "width=" + std::to_string(d.td.width()) + " bags=" + std::to_string(d.td.bags.size()));
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Stable, popular and dominant matchings under strict preferences."};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-q,--quiet", o.quiet, "Print only the result line");
  app.add_option("--seed", o.seed, "Seed for randomized corpus generation");
  app.add_option("--jobs", o.jobs, "Worker threads for the oracle and the treewidth DP")->check(CLI::Range(1, 256));
  app.add_flag("--assert-internal", o.assert_internal, "Cross-check the treewidth DP against direct computations");

  std::function<int(Report&, const Options&)> action;
  auto leaf = [&](CLI::App* group, const std::string& name, const std::string& help,
                  int (*fn)(Report&, const Options&)) {
    auto* c = group->add_subcommand(name, help);
    c->callback([&action, fn] { action = fn; });
    return c;
  };
  auto with_instance = [&](CLI::App* c) { c->add_option("-i,--instance", o.instance, "Instance file ('-' for stdin)")->required(); };
  auto with_matching = [&](CLI::App* c) {
    with_instance(c);
    c->add_option("-m,--matching", o.matching, "Matching file")->required();
  };
  auto with_output = [&](CLI::App* c) { c->add_option("-o,--output", o.output, "Write the result artifact here"); };

  auto* check = app.add_subcommand("check", "Decide a property of a given matching");
  check->require_subcommand(1);
  check->fallthrough();
  with_matching(leaf(check, "stable", "No blocking edge", check_stable));
  with_matching(leaf(check, "popular", "No forbidden alternating structure", check_popular));
  with_matching(leaf(check, "dominant", "Popular and no augmenting path", check_dominant));
  with_matching(leaf(check, "strongly-dominant", "2-SAT partition search", check_strongly_dominant));
  {
    auto* c = leaf(check, "locally-popular", "Forbidden structures inside the separator view", check_locally_popular);
    with_matching(c);
    c->add_option("--separator", o.separator, "Nodes of S");
    c->add_option("--component", o.component, "Nodes of X")->required();
  }

  auto* solve = app.add_subcommand("solve", "Compute a matching");
  solve->require_subcommand(1);
  solve->fallthrough();
  {
    auto* c = leaf(solve, "stable", "Gale-Shapley (bipartite)", solve_stable);
    with_instance(c);
    with_output(c);
    c->add_option("--side", o.side, "Proposing side, A or B");
  }
  {
    auto* c = leaf(solve, "roommates-stable", "Irving's algorithm", solve_roommates_stable);
    with_instance(c);
    with_output(c);
  }
  {
    auto* c = leaf(solve, "strongly-dominant", "Strongly dominant matching with a unit witness", solve_strongly_dominant);
    with_instance(c);
    with_output(c);
  }
  {
    auto* c = leaf(solve, "min-cost-popular", "Dynamic program over a tree decomposition", solve_min_cost_popular);
    with_instance(c);
    with_output(c);
    c->add_option("--td", o.td, "Tree decomposition file (computed when absent)");
    c->add_option("--width-cap", o.width_cap, "Largest accepted width when computing a decomposition");
  }
  {
    auto* c = leaf(solve, "approx-max-weight",
                   "Better of max-weight stable and dominant; the dominant side enumerates matchings, so small "
                   "instances only",
                   solve_approx);
    with_instance(c);
    with_output(c);
  }

  auto* witness = app.add_subcommand("witness", "Dual certificates of popularity");
  witness->require_subcommand(1);
  witness->fallthrough();
  {
    auto* c = leaf(witness, "find", "Exact LP witness (bipartite)", witness_find);
    with_matching(c);
    with_output(c);
  }
  {
    auto* c = leaf(witness, "find-unit", "Witness with entries in {0, +1, -1}", witness_find_unit);
    with_matching(c);
    with_output(c);
  }
  {
    auto* c = leaf(witness, "verify", "Check a witness file", witness_verify);
    with_matching(c);
    c->add_option("-w,--witness", o.witness, "Witness file")->required();
  }

  auto* orc = app.add_subcommand("oracle", "Exhaustive ground truth on small instances");
  orc->require_subcommand(1);
  orc->fallthrough();
  with_instance(leaf(orc, "classify", "Flags of every matching", oracle_classify));
  {
    auto* c = leaf(orc, "optimize", "Min-cost or max-weight popular matching", oracle_optimize);
    with_instance(c);
    with_output(c);
    c->add_option("--objective", o.objective, "min-cost or max-weight");
  }
  {
    auto* c = leaf(orc, "pmffe", "Popular matching with forced and forbidden elements", oracle_pmffe);
    with_instance(c);
    with_output(c);
    c->add_option("--e0", o.e0, "Forbidden edges, e.g. \"a b, c d\"");
    c->add_option("--e1", o.e1, "Forced edges");
    c->add_option("--u0", o.u0, "Nodes that must stay unmatched");
    c->add_option("--u1", o.u1, "Nodes that must be matched");
  }

  auto* gadget = app.add_subcommand("gadget", "Hardness gadgets for positive 1-in-3 SAT");
  gadget->require_subcommand(1);
  gadget->fallthrough();
  auto with_formula = [&](CLI::App* c) { c->add_option("-f,--formula", o.formula, "DIMACS formula")->required(); };
  {
    auto* c = leaf(gadget, "build", "Build an instance", gadget_build);
    with_formula(c);
    with_output(c);
    c->add_option("--variant", o.variant, "g, g0, gprime or h");
  }
  {
    auto* c = leaf(gadget, "encode", "Popular matching of an assignment", gadget_encode);
    with_formula(c);
    with_output(c);
    c->add_option("--assign", o.assign, "True variables, e.g. \"1,4\"")->required();
  }
  {
    auto* c = leaf(gadget, "decode", "Assignment of a popular matching", gadget_decode);
    with_formula(c);
    c->add_option("-m,--matching", o.matching, "Matching file")->required();
  }
  {
    auto* c = leaf(gadget, "exemplars", "The stable matchings S, S' and the dominant M*", gadget_exemplars);
    with_formula(c);
    with_output(c);
  }

  auto* treewidth = app.add_subcommand("treewidth", "Tree decompositions");
  treewidth->require_subcommand(1);
  treewidth->fallthrough();
  {
    auto* c = leaf(treewidth, "decompose", "Min-fill decomposition", treewidth_decompose);
    with_instance(c);
    with_output(c);
    c->add_option("--width-cap", o.width_cap, "Largest accepted width");
  }
  {
    auto* c = leaf(treewidth, "dichotomic", "At most two predecessors per bag", treewidth_dichotomic);
    with_instance(c);
    with_output(c);
    c->add_option("--td", o.td, "Tree decomposition file (computed when absent)");
    c->add_option("--width-cap", o.width_cap, "Largest accepted width when computing a decomposition");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cout << "result: usage-error\n";
    return kInput;
  }

  Report r;
  int code;
  try {
    code = action(r, o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    r.finish(kInput, "input-error");
    code = kInput;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    r.finish(kBudget, "budget-exceeded");
    code = kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    r.finish(kInput, "error");
    code = kInput;
  }
  if (!o.quiet) std::cout << r.body.str();
  std::cout << "result: " << r.result << "\n";
  return code;
}
