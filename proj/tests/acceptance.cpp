// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "popmatch/dominant.hpp"
#include "popmatch/gadgets.hpp"
#include "popmatch/oracle.hpp"
#include "popmatch/stable.hpp"
#include "popmatch/treewidth.hpp"
#include "popmatch/verify.hpp"
#include "support.hpp"

using namespace popmatch;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kCorpusSeed = 2024;
constexpr int kCorpusSize = 240;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail << what;
    pass = false;
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

const std::vector<Instance>& corpus() {
  static const std::vector<Instance> c = fixtures::corpus(kCorpusSeed, kCorpusSize);
  return c;
}

std::vector<const Instance*> bipartite_corpus() {
  std::vector<const Instance*> out;
  for (const auto& i : corpus())
    if (i.bipartite()) out.push_back(&i);
  return out;
}

bool unit_entries(const Instance& inst, const Matching& m, const Witness& w) {
  for (int u = 0; u < inst.size(); ++u) {
    const Rational& a = w.alpha[u];
    if (a != 0 && a != 1 && a != -1) return false;
    if ((a == 0) != !m.matched(u)) return false;
  }
  return true;
}

void structural_popularity(Outcome& o) {
  auto start = Clock::now();
  long checked = 0, mismatches = 0;
  for (const auto& inst : corpus()) {
    auto all = oracle::enumerate_matchings(inst);
    for (const auto& m : all) {
      ++checked;
      if (verify::is_popular_structural(inst, m).verdict != oracle::popular_against(inst, m, all)) ++mismatches;
    }
  }
  double t = seconds_since(start);
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.require(t < 60, "took too long");
  o.detail << (o.pass ? "" : "; ") << corpus().size() << " instances, " << checked << " matchings, " << t << " s";
}

void dominance(Outcome& o) {
  long bip = 0, bip_bad = 0, room = 0, room_bad = 0;
  for (const auto& inst : corpus()) {
    auto all = oracle::enumerate_matchings(inst);
    for (const auto& m : all) {
      if (!oracle::popular_against(inst, m, all)) continue;
      bool agree = verify::is_dominant_structural(inst, m).verdict == oracle::dominant_against(inst, m, all);
      (inst.bipartite() ? bip : room)++;
      if (!agree) (inst.bipartite() ? bip_bad : room_bad)++;
    }
  }
  o.require(bip_bad == 0, std::to_string(bip_bad) + " bipartite disagreements");
  o.detail << (o.pass ? "" : "; ") << bip << " bipartite and " << room << " roommates popular matchings";
  if (room_bad > 0)
    o.detail << "; finding: structural dominance disagrees with the vote definition on " << room_bad
             << " roommates matchings";
  else
    o.detail << "; finding: no roommates disagreement";
}

void strongly_dominant_algorithm(Outcome& o) {
  int returned = 0;
  for (const auto& inst : corpus()) {
    auto sd = dominant::strongly_dominant(inst);
    bool exists = false;
    for (const auto& m : oracle::enumerate_matchings(inst))
      if (oracle::strongly_dominant_by_partition(inst, m)) {
        exists = true;
        break;
      }
    o.require(sd.has_value() == exists, "existence differs from the oracle on\n" + write_instance(inst));
    if (inst.bipartite()) o.require(sd.has_value(), "none on a bipartite instance");
    if (!sd) continue;
    ++returned;
    o.require(oracle::strongly_dominant_by_partition(inst, sd->first), "returned matching not strongly dominant");
    o.require(verify::verify_witness(inst, sd->first, sd->second), "witness rejected");
    o.require(unit_entries(inst, sd->first, sd->second), "witness entries not of the unit shape");
  }
  Instance d = fixtures::d_instance();
  auto dd = dominant::strongly_dominant(d);
  o.require(dd && (dd->first == fixtures::pairs(d, {{"d0", "d1"}, {"d2", "d3"}}) ||
                   dd->first == fixtures::pairs(d, {{"d0", "d2"}, {"d1", "d3"}})),
            "d-instance answer is not a golden matching");
  o.require(!dominant::strongly_dominant(fixtures::abcd_instance()), "a,b,c,d instance returned a matching");
  o.detail << (o.pass ? "" : "; ") << returned << " matchings returned and certified";
}

void bipartite_dominant_sets(Outcome& o) {
  int n = 0;
  for (const auto* inst : bipartite_corpus()) {
    ++n;
    auto c = oracle::classify(*inst);
    for (std::size_t i = 0; i < c.matchings.size(); ++i) {
      bool sd = verify::is_strongly_dominant(*inst, c.matchings[i]).has_value();
      o.require(sd == c.flags[i].dominant, "dominant and strongly dominant sets differ on\n" + write_instance(*inst));
    }
  }
  o.detail << (o.pass ? "" : "; ") << n << " bipartite instances";
}

void witness_duality(Outcome& o) {
  long lp = 0, unit = 0;
  for (const auto* inst : bipartite_corpus()) {
    auto all = oracle::enumerate_matchings(*inst);
    for (const auto& m : all) {
      bool popular = oracle::popular_against(*inst, m, all);
      auto w = verify::find_witness(*inst, m);
      ++lp;
      o.require(w.has_value() == popular, "LP witness existence differs from popularity");
      if (w) o.require(verify::verify_witness(*inst, m, *w), "LP witness rejected");
      if (!popular) continue;
      try {
        Witness u = verify::find_unit_witness(*inst, m);
        o.require(verify::verify_witness(*inst, m, u), "unit witness rejected");
        ++unit;
      } catch (const InputError&) {
        o.require(false, "no unit witness for a popular matching");
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << lp << " matchings, " << unit << " unit witnesses";
}

void gadget_forward(Outcome& o) {
  auto start = Clock::now();
  int total = 0;
  for (const char* text : {"p cnf 3 1\n1 2 3 0\n", "p cnf 5 2\n1 2 3 0\n3 4 5 0\n"}) {
    auto phi = gadgets::parse_cnf(text);
    Instance g = gadgets::build_gadget(phi, gadgets::Variant::G);
    auto assignments = gadgets::one_in_three_assignments(phi);
    if (phi.clauses.size() == 1) o.require(assignments.size() == 3, "expected 3 one-in-three assignments");
    for (const auto& a : assignments) {
      ++total;
      auto [m, w] = gadgets::assignment_to_matching(phi, a);
      o.require(verify::is_popular_structural(g, m).verdict, "(a) not popular");
      o.require(verify::verify_witness(g, m, w), "(b) witness rejected");
      o.require(!is_stable(g, m), "(c) no blocking edge");
      o.require(!verify::is_dominant_structural(g, m).verdict, "(d) dominant");
      std::set<std::string> exposed;
      for (int u = 0; u < g.size(); ++u)
        if (!m.matched(u)) exposed.insert(g.name(u));
      o.require(exposed == std::set<std::string>{"z", "z'"}, "(e) exposed set is not {z, z'}");
      o.require(gadgets::matching_to_assignment(phi, m) == a, "(f) round trip failed");
    }
  }
  double t = seconds_since(start);
  o.require(t < 10, "took too long");
  o.detail << (o.pass ? "" : "; ") << total << " assignments, " << t << " s";
}

void exemplars(Outcome& o) {
  for (const char* text : {"p cnf 3 1\n1 2 3 0\n", "p cnf 5 2\n1 2 3 0\n3 4 5 0\n"}) {
    auto phi = gadgets::parse_cnf(text);
    Instance g = gadgets::build_gadget(phi, gadgets::Variant::G);
    auto ex = gadgets::exemplar_matchings(phi);
    o.require(is_stable(g, ex.s), "S not stable");
    o.require(is_stable(g, ex.s_prime), "S' not stable");
    o.require(verify::is_dominant_structural(g, ex.m_star).verdict, "M* not dominant");
    o.require(verify::verify_witness(g, ex.m_star, ex.m_star_witness), "M* witness rejected");
    o.require(2 * ex.m_star.size() == g.size(), "M* not perfect");
  }
  o.detail << (o.pass ? "" : "; ") << "1- and 2-clause formulas";
}

void treewidth_dp(Outcome& o) {
  auto start = Clock::now();
  int n = 0, none = 0, mismatches = 0, max_width = 0;
  for (const auto& inst : fixtures::low_width_corpus(kCorpusSeed + 8, 150)) {
    ++n;
    auto td = tw::find_tree_decomposition(inst, 3);
    max_width = std::max(max_width, td.width());
    auto got = tw::min_cost_popular_tw(inst, tw::make_dichotomic(td));
    auto want = oracle::optimize(tw::perturb_costs(inst), oracle::Objective::min_cost_popular);
    auto plain = oracle::optimize(inst, oracle::Objective::min_cost_popular);
    bool same = got.has_value() == want.has_value();
    if (same && got)
      same = got->first == want->first && got->second == cost_of(inst, want->first) && got->second == plain->second;
    if (!same) ++mismatches;
    if (!got) ++none;
  }
  double t = seconds_since(start);
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.require(t < 300, "took too long");
  o.detail << (o.pass ? "" : "; ") << n << " instances (max width " << max_width << ", " << none
           << " without a popular matching), " << t << " s";
}

Instance tight_fixture() {
  std::string text = "popmatch v1 bipartite\n";
  for (int k : {1, 2}) {
    std::string s = std::to_string(k);
    text += "node a1_" + s + " A\nnode a2_" + s + " A\nnode b1_" + s + " B\nnode b2_" + s + " B\n";
  }
  for (int k : {1, 2}) {
    std::string s = "_" + std::to_string(k);
    text += "pref a1" + s + ": b1" + s + "\n";
    text += "pref b1" + s + ": a2" + s + " a1" + s + "\n";
    text += "pref a2" + s + ": b1" + s + " b2" + s + "\n";
    text += "pref b2" + s + ": a2" + s + "\n";
  }
  text += "cost a2_1 b1_1: 1\ncost a1_2 b1_2: 1\n";
  return parse_instance(text);
}

void half_approximation(Outcome& o) {
  std::mt19937_64 rng(kCorpusSeed + 9);
  int n = 0;
  Rational worst = 1;
  for (const auto* base : bipartite_corpus()) {
    Instance inst = fixtures::with_random_costs(rng, *base, 0, 10, 1 + static_cast<int>(rng() % 3));
    auto a = dominant::approx_max_weight_popular(inst);
    auto best = oracle::optimize(inst, oracle::Objective::max_weight_popular);
    ++n;
    o.require(verify::is_popular_structural(inst, a.chosen).verdict, "output not popular");
    o.require(best && 2 * a.cost >= best->second, "below half of the optimum");
    if (best && best->second > 0) worst = std::min(worst, Rational(a.cost / best->second));
  }
  Instance tight = tight_fixture();
  auto a = dominant::approx_max_weight_popular(tight);
  auto best = oracle::optimize(tight, oracle::Objective::max_weight_popular);
  Rational ratio = a.cost / best->second;
  o.require(ratio < Rational(3, 5), "fixture ratio not below 0.6");
  o.detail << (o.pass ? "" : "; ") << n << " instances, worst corpus ratio " << to_string(worst)
           << ", fixture ratio " << to_string(ratio);
}

void edge_identities(Outcome& o) {
  int n = 0;
  for (const auto* inst : bipartite_corpus()) {
    auto c = oracle::classify(*inst);
    try {
      auto sets = dominant::popular_edge_sets(*inst, c.with(&oracle::Flags::popular), c.with(&oracle::Flags::dominant));
      // Recompute the stable side independently of the module.
      std::set<int> in_stable, avoided_by_stable;
      for (const auto& m : c.with(&oracle::Flags::stable))
        for (int e = 0; e < inst->edge_count(); ++e) (m.contains(e) ? in_stable : avoided_by_stable).insert(e);
      o.require(std::vector<int>(in_stable.begin(), in_stable.end()) == sets.stable, "stable edge set differs");
      o.require(std::vector<int>(avoided_by_stable.begin(), avoided_by_stable.end()) == sets.not_stable,
                "non-stable edge set differs");
      std::vector<int> u1, u2;
      std::set_union(sets.stable.begin(), sets.stable.end(), sets.dominant.begin(), sets.dominant.end(),
                     std::back_inserter(u1));
      std::set_union(sets.not_stable.begin(), sets.not_stable.end(), sets.not_dominant.begin(),
                     sets.not_dominant.end(), std::back_inserter(u2));
      o.require(u1 == sets.popular, "popular edges differ from stable plus dominant");
      o.require(u2 == sets.not_popular, "avoidable edges differ");
    } catch (const std::logic_error& e) {
      o.require(false, e.what());
    }
    ++n;
  }
  o.detail << (o.pass ? "" : "; ") << n << " bipartite instances";
}

void path_decomposition(Outcome& o) {
  std::mt19937_64 rng(kCorpusSeed + 11);
  auto insts = fixtures::low_width_corpus(kCorpusSeed + 12, 40);
  int done = 0, pieces_total = 0;
  auto in = [](const std::vector<int>& set, int v) { return std::find(set.begin(), set.end(), v) != set.end(); };
  while (done < 1000) {
    const Instance& inst = insts[rng() % insts.size()];
    auto all = oracle::enumerate_matchings(inst);
    const Matching& m = all[rng() % all.size()];
    auto d = tw::make_dichotomic(tw::find_tree_decomposition(inst, 3));
    int b = static_cast<int>(rng() % d.td.bags.size());
    if (d.successor[b] < 0) continue;
    std::vector<int> sub = d.td.bags[b];
    std::vector<int> stack(d.predecessors[b]);
    while (!stack.empty()) {
      int c = stack.back();
      stack.pop_back();
      sub.insert(sub.end(), d.td.bags[c].begin(), d.td.bags[c].end());
      stack.insert(stack.end(), d.predecessors[c].begin(), d.predecessors[c].end());
    }
    std::sort(sub.begin(), sub.end());
    sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
    const auto& bag = d.td.bags[b];
    const auto& next = d.td.bags[d.successor[b]];
    std::vector<int> s, x;
    std::set_intersection(bag.begin(), bag.end(), next.begin(), next.end(), std::back_inserter(s));
    std::set_difference(sub.begin(), sub.end(), s.begin(), s.end(), std::back_inserter(x));
    AltGraph g = alt_graph(inst, m);
    std::vector<int> path{static_cast<int>(rng() % inst.size())};
    int last = -1;
    for (int step = 0; step < 12; ++step) {
      std::vector<const AltGraph::Arc*> options;
      for (const auto& a : g.adj[path.back()])
        if (!in(path, a.to) && static_cast<int>(a.matched) != last) options.push_back(&a);
      if (options.empty()) break;
      const auto* a = options[rng() % options.size()];
      last = a->matched;
      path.push_back(a->to);
    }
    auto pieces = tw::decompose_path(path, s, x);
    pieces_total += static_cast<int>(pieces.size());
    o.require(tw::juxtapose(pieces) == path, "juxtaposition differs from the path");
    for (const auto& p : pieces) {
      bool touches = std::any_of(p.nodes.begin(), p.nodes.end(), [&](int v) { return in(x, v); });
      if (p.index > 0 && p.index % 2 == 0) o.require(!touches, "even piece enters X");
      if (p.index > 0 && p.index % 2 == 1) o.require(p.hidden, "odd piece not hidden");
      if (!p.hidden) continue;
      bool ok = true;
      for (int v : p.nodes) ok = ok && (in(x, v) || in(s, v));
      for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) ok = ok && !in(s, p.nodes[i]);
      o.require(ok, "hidden piece leaves X or crosses S");
    }
    ++done;
  }
  o.detail << (o.pass ? "" : "; ") << done << " paths, " << pieces_total << " pieces";
}

// ---- determinism ----

std::string run_cli(const std::string& args) {
  std::string cmd = std::string(POPMATCH_CLI) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return "popen failed\n";
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return out + "exit " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) + "\n";
}

void determinism(Outcome& o) {
  fs::path dir = fs::temp_directory_path() / ("popmatch_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  std::string d = put("d.inst", write_instance(fixtures::d_instance()));
  std::string abcd = put("abcd.inst", write_instance(fixtures::abcd_instance()));
  std::string tight = put("tight.inst", write_instance(tight_fixture()));
  std::string pop = put("pop.txt", "match d0 d1\nmatch d2 d3\n");
  std::string bad = put("bad.txt", "match d0 d3\nmatch d1 d2\n");
  std::string one = put("one.cnf", "p cnf 3 1\n1 2 3 0\n");
  std::string two = put("two.cnf", "p cnf 5 2\n1 2 3 0\n3 4 5 0\n");
  std::vector<std::string> commands = {
      "check stable -i " + d + " -m " + pop,
      "check popular -i " + d + " -m " + pop,
      "check popular -i " + d + " -m " + bad,
      "check dominant -i " + d + " -m " + pop,
      "check strongly-dominant -i " + d + " -m " + pop,
      "check locally-popular -i " + d + " -m " + bad + " --separator d0 --component \"d1 d2 d3\"",
      "solve stable --side A -i " + tight,
      "solve stable --side B -i " + tight,
      "solve roommates-stable -i " + abcd,
      "solve strongly-dominant -i " + d,
      "solve strongly-dominant -i " + abcd,
      "solve min-cost-popular --jobs 4 -i " + tight,
      "solve approx-max-weight -i " + tight,
      "witness find-unit -i " + d + " -m " + pop,
      "oracle classify --jobs 3 -i " + d,
      "oracle classify -i " + abcd,
      "oracle optimize --objective max-weight -i " + tight,
      "oracle pmffe -i " + d + " --e1 \"d0 d2\"",
      "gadget build --variant h -f " + two,
      "gadget encode --assign 1,4 -f " + two,
      "gadget exemplars -f " + one,
      "treewidth decompose -i " + tight,
      "treewidth dichotomic -i " + abcd,
  };
  for (const auto& inst : fixtures::low_width_corpus(kCorpusSeed + 13, 12)) {
    std::string f = put("lw" + std::to_string(commands.size()) + ".inst", write_instance(inst));
    commands.push_back("solve min-cost-popular --assert-internal --jobs 2 -i " + f);
    commands.push_back("oracle optimize -i " + f);
  }
  std::vector<std::string> outputs;
  for (int rep = 0; rep < 3; ++rep) {
    std::string all;
    for (const auto& c : commands) all += "$ " + c.substr(0, c.find(" -i ")) + "\n" + run_cli(c);
    outputs.push_back(all);
  }
  fs::remove_all(dir);
  o.require(outputs[0] == outputs[1] && outputs[1] == outputs[2], "outputs differ between runs");
  o.require(outputs[0].find("error") == std::string::npos, "a suite command failed");
  o.detail << (o.pass ? "" : "; ") << commands.size() << " commands x 3 runs, " << outputs[0].size() << " bytes";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"structural popularity matches the vote definition", structural_popularity},
      {"structural dominance matches the vote definition", dominance},
      {"strongly dominant algorithm", strongly_dominant_algorithm},
      {"bipartite dominant = strongly dominant", bipartite_dominant_sets},
      {"witness duality", witness_duality},
      {"gadget forward construction", gadget_forward},
      {"exemplar matchings", exemplars},
      {"treewidth DP matches the oracle", treewidth_dp},
      {"half approximation", half_approximation},
      {"popular edge identities", edge_identities},
      {"path decomposition", path_decomposition},
      {"deterministic CLI output", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << o.detail.str()
              << ")" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
