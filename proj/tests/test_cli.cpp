#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string last_line() const {
    auto end = out.find_last_not_of('\n');
    if (end == std::string::npos) return "";
    auto start = out.rfind('\n', end);
    return out.substr(start == std::string::npos ? 0 : start + 1, end - (start == std::string::npos ? 0 : start + 1) + 1);
  }
};

Run run(const std::string& args) {
  std::string cmd = std::string(POPMATCH_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("popmatch_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    write("d.inst", popmatch::write_instance(fixtures::d_instance()));
    write("abcd.inst", popmatch::write_instance(fixtures::abcd_instance()));
    write("pop.txt", "match d0 d1\nmatch d2 d3\n");
    write("bad.txt", "match d0 d3\nmatch d1 d2\n");
    write("one.cnf", "p cnf 3 1\n1 2 3 0\n");
    write("cycle4.inst",
          "popmatch v1 bipartite\nnode a1 A\nnode a2 A\nnode b1 B\nnode b2 B\n"
          "pref a1: b1 b2\npref a2: b2 b1\npref b1: a2 a1\npref b2: a1 a2\n"
          "cost a1 b1: 3/2\ncost a2 b2: 1/3\ncost a1 b2: 2\ncost a2 b1: 0\n");
    write("triangle.inst",
          "popmatch v1 roommates\nnode a\nnode b\nnode c\npref a: b c\npref b: c a\npref c: a b\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckPopularExitCodes) {
  auto ok = run("check popular -i " + path("d.inst") + " -m " + path("pop.txt"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.last_line(), "result: popular");
  auto no = run("check popular -i " + path("d.inst") + " -m " + path("bad.txt"));
  EXPECT_EQ(no.code, 1);
  EXPECT_NE(no.out.find("violation "), std::string::npos);
  EXPECT_EQ(no.last_line(), "result: not-popular");
}

TEST_F(Cli, QuietPrintsOnlyResult) {
  auto r = run("check popular -q -i " + path("d.inst") + " -m " + path("bad.txt"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "result: not-popular\n");
}

TEST_F(Cli, CheckStableAndDominant) {
  auto s = run("check stable -i " + path("d.inst") + " -m " + path("pop.txt"));
  EXPECT_EQ(s.code, 1);
  EXPECT_NE(s.out.find("violation blocking-edge:"), std::string::npos);
  auto d = run("check dominant -i " + path("d.inst") + " -m " + path("pop.txt"));
  EXPECT_EQ(d.code, 0);
  write("ad.txt", "match a d\nmatch b c\n");
  auto sd = run("check strongly-dominant -i " + path("abcd.inst") + " -m " + path("ad.txt"));
  EXPECT_EQ(sd.code, 1);
  EXPECT_EQ(sd.last_line(), "result: not-strongly-dominant");
  auto sd2 = run("check strongly-dominant -i " + path("d.inst") + " -m " + path("pop.txt"));
  EXPECT_EQ(sd2.code, 0);
}

TEST_F(Cli, SolveCommands) {
  auto rs = run("solve roommates-stable -i " + path("d.inst"));
  EXPECT_EQ(rs.code, 1);
  EXPECT_EQ(rs.last_line(), "result: none");
  auto sd = run("solve strongly-dominant -i " + path("abcd.inst"));
  EXPECT_EQ(sd.code, 1);
  auto gs = run("solve stable --side B -i " + path("cycle4.inst"));
  EXPECT_EQ(gs.code, 0);
  EXPECT_NE(gs.out.find("match a1 b2"), std::string::npos);
  auto bad_side = run("solve stable --side C -i " + path("cycle4.inst"));
  EXPECT_EQ(bad_side.code, 2);
}

TEST_F(Cli, MinCostPopularOnFourCycle) {
  // Popular matchings: {a1 b1, a2 b2} (cost 11/6) and {a1 b2, a2 b1} (cost 2).
  auto r = run("solve min-cost-popular --assert-internal -i " + path("cycle4.inst"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("match a1 b1\nmatch a2 b2\n"), std::string::npos);
  EXPECT_EQ(r.last_line(), "result: min-cost-popular cost=11/6");
  auto o = run("oracle optimize --objective min-cost -q -i " + path("cycle4.inst"));
  EXPECT_EQ(o.out, "result: min-cost cost=11/6\n");
  auto none = run("solve min-cost-popular -i " + path("triangle.inst"));
  EXPECT_EQ(none.code, 1);
  EXPECT_EQ(none.last_line(), "result: none");
}

TEST_F(Cli, MinCostPopularWithDecompositionFile) {
  write("c4.td", "bag 0: a1 b1 a2\nbag 1: a2 b2 a1\ntedge 0 1\n");
  auto r = run("solve min-cost-popular -i " + path("cycle4.inst") + " --td " + path("c4.td"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.last_line(), "result: min-cost-popular cost=11/6");
  write("broken.td", "bag 0: a1 b1\nbag 1: a2 b2\ntedge 0 1\n");
  EXPECT_EQ(run("solve min-cost-popular -i " + path("cycle4.inst") + " --td " + path("broken.td")).code, 2);
}

TEST_F(Cli, WitnessRoundTrip) {
  auto f = run("witness find-unit -i " + path("d.inst") + " -m " + path("pop.txt") + " -o " + path("w.txt"));
  EXPECT_EQ(f.code, 0);
  auto v = run("witness verify -i " + path("d.inst") + " -m " + path("pop.txt") + " -w " + path("w.txt"));
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.last_line(), "result: valid-witness");
  write("zero.txt", "alpha d0: 0\nalpha d1: 0\nalpha d2: 0\nalpha d3: 0\n");
  auto z = run("witness verify -i " + path("d.inst") + " -m " + path("pop.txt") + " -w " + path("zero.txt"));
  EXPECT_EQ(z.code, 1);
  auto lp = run("witness find -i " + path("cycle4.inst") + " -m " + path("pop.txt"));
  EXPECT_EQ(lp.code, 2);  // matching names nodes of another instance
}

TEST_F(Cli, OracleCommands) {
  auto c = run("oracle classify -i " + path("d.inst"));
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.last_line(), "result: stable=0 popular=2 dominant=2 strongly-dominant=2");
  auto p = run("oracle pmffe -i " + path("d.inst") + " --e1 \"d0 d2\"");
  EXPECT_EQ(p.code, 0);
  EXPECT_NE(p.out.find("match d1 d3"), std::string::npos);
  auto none = run("oracle pmffe -i " + path("d.inst") + " --e0 \"d0 d1\" --e1 \"d0 d1\"");
  EXPECT_EQ(none.code, 1);
  EXPECT_EQ(run("oracle pmffe -i " + path("d.inst") + " --e1 \"d0\"").code, 2);
}

TEST_F(Cli, GadgetCommands) {
  auto b = run("gadget build --variant g -f " + path("one.cnf") + " -o " + path("g.inst"));
  EXPECT_EQ(b.code, 0);
  std::ifstream in(path("g.inst"));
  std::string text((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(popmatch::parse_instance(text).size(), 54);
  auto e = run("gadget encode --assign 3 -f " + path("one.cnf") + " -o " + path("enc.txt"));
  EXPECT_EQ(e.code, 0);
  auto d = run("gadget decode -f " + path("one.cnf") + " -m " + path("enc.txt"));
  EXPECT_EQ(d.code, 2);  // witness lines are not matching lines
  std::ifstream enc(path("enc.txt"));
  std::string line, only;
  while (std::getline(enc, line))
    if (line.rfind("match ", 0) == 0) only += line + "\n";
  write("enc_m.txt", only);
  auto d2 = run("gadget decode -f " + path("one.cnf") + " -m " + path("enc_m.txt"));
  EXPECT_EQ(d2.code, 0);
  EXPECT_EQ(d2.last_line(), "result: assignment true=3");
  EXPECT_EQ(run("gadget encode --assign 1,2 -f " + path("one.cnf")).code, 2);
  EXPECT_EQ(run("gadget build --variant q -f " + path("one.cnf")).code, 2);
  EXPECT_EQ(run("gadget exemplars -q -f " + path("one.cnf")).out, "result: exemplars\n");
}

TEST_F(Cli, TreewidthCommands) {
  auto d = run("treewidth decompose -i " + path("d.inst"));
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(d.last_line(), "result: width=3 bags=1");
  EXPECT_EQ(run("treewidth decompose --width-cap 2 -i " + path("d.inst")).code, 2);
  auto di = run("treewidth dichotomic -i " + path("cycle4.inst"));
  EXPECT_EQ(di.code, 0);
}

TEST_F(Cli, LocallyPopular) {
  auto r = run("check locally-popular -i " + path("d.inst") + " -m " + path("bad.txt") +
               " --component \"d0 d1 d2 d3\"");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.last_line(), "result: not-locally-popular");
}

TEST_F(Cli, UsageAndInputErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("check popular -i " + path("d.inst")).code, 2);
  EXPECT_EQ(run("check popular -i /nonexistent -m " + path("pop.txt")).code, 2);
  EXPECT_EQ(run("--help").code, 0);
  auto r = run("check popular -i " + path("d.inst") + " -m " + path("d.inst"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.last_line(), "result: input-error");
}

TEST_F(Cli, BudgetExceeded) {
  std::string text = "popmatch v1 roommates\n";
  for (int i = 0; i < 14; ++i) text += "node n" + std::to_string(i) + "\n";
  for (int i = 0; i < 14; ++i) {
    text += "pref n" + std::to_string(i) + ":";
    for (int j = 0; j < 14; ++j)
      if (j != i) text += " n" + std::to_string(j);
    text += "\n";
  }
  write("k14.inst", text);
  auto r = run("oracle classify -i " + path("k14.inst"));
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.last_line(), "result: budget-exceeded");
}

// Mangled instance files must end in exit 2, never a crash.
TEST_F(Cli, FuzzedInputsNeverCrash) {
  std::string base = popmatch::write_instance(fixtures::abcd_instance());
  std::mt19937_64 rng(81);
  const std::string alphabet = "abcdz:#\n 0123456789/-popmatchv1";
  for (int t = 0; t < 60; ++t) {
    std::string s = base;
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits; ++k) {
      std::size_t pos = rng() % s.size();
      switch (rng() % 3) {
        case 0: s.erase(pos, 1 + rng() % 5); break;
        case 1: s.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        default: s[pos] = alphabet[rng() % alphabet.size()];
      }
      if (s.empty()) s = "x";
    }
    write("fuzz.inst", s);
    auto r = run("oracle classify -i " + path("fuzz.inst"));
    ASSERT_TRUE(r.code == 0 || r.code == 2) << s;
    ASSERT_EQ(r.last_line().rfind("result: ", 0), 0u);
  }
}

TEST_F(Cli, RepeatedRunsAreIdentical) {
  std::string cmd = "oracle classify -i " + path("d.inst");
  auto a = run(cmd), b = run(cmd), c = run(cmd);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(b.out, c.out);
}
