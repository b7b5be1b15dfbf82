#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "popmatch/core.hpp"
#include "popmatch/verify.hpp"

namespace popmatch::gadgets {

// Positive 3-CNF. Variables are 1-based.
struct PositiveCnf {
  int num_vars = 0;
  std::vector<std::array<int, 3>> clauses;
};

struct Assignment {
  std::vector<bool> value;  // value[r - 1] is X_r
  bool operator[](int r) const { return value[r - 1]; }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

enum class Variant { G, G0, Gprime, H };

// DIMACS "p cnf V C" followed by clauses terminated by 0.
PositiveCnf parse_cnf(std::string_view text);
// True variables separated by spaces or commas, e.g. "2" or "1,4".
Assignment parse_assignment(const PositiveCnf& phi, std::string_view text);
std::string write_assignment(const Assignment& a);
// Throws InputError naming the first clause without exactly one true variable.
void check_one_in_three(const PositiveCnf& phi, const Assignment& a);
// Every 1-in-3 satisfying assignment, in lexicographic order of value vectors. Small formulas only.
std::vector<Assignment> one_in_three_assignments(const PositiveCnf& phi);

Variant parse_variant(std::string_view s);

Instance build_gadget(const PositiveCnf& phi, Variant variant);

struct Exemplars {
  Matching s;         // A-optimal stable
  Matching s_prime;   // B-optimal stable
  Matching m_star;    // dominant, perfect
  Witness m_star_witness;
};
Exemplars exemplar_matchings(const PositiveCnf& phi);

// Popular matching of build_gadget(phi, G) covering everything but z and z', with its witness.
std::pair<Matching, Witness> assignment_to_matching(const PositiveCnf& phi, const Assignment& a);
// X_r is true iff (x_r, y'_r) is in m. Throws InputError unless m is popular and leaves exactly z, z' exposed.
Assignment matching_to_assignment(const PositiveCnf& phi, const Matching& m);

// Carries a matching of the G instance over to another variant. G0 gets (x0,y'0),(x'0,y0);
// Gprime and H rename z' to z; H gets (d0,d1),(d2,d3). Edges at z or z' are rejected for Gprime and H.
Matching lift_matching(const PositiveCnf& phi, const Matching& on_g, Variant target);

// The concrete forced/forbidden element choices for the six hardness regimes (1..6).
struct ForcedFixture {
  Variant variant;
  Instance inst;
  std::vector<int> e0, e1, u0, u1;
};
ForcedFixture forced_fixture(const PositiveCnf& phi, int regime);

}  // namespace popmatch::gadgets
