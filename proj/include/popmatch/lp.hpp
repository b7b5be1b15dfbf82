#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "popmatch/core.hpp"

namespace popmatch {

enum class Relation { le, ge, eq };

struct LinearConstraint {
  std::vector<std::pair<int, Rational>> terms;  // (variable, coefficient)
  Relation rel;
  Rational rhs;
};

// Some x >= 0 satisfying every constraint, or nullopt if none exists.
// Phase-one simplex over exact rationals with Bland's pivoting rule.
std::optional<std::vector<Rational>> lp_feasible(int num_vars, const std::vector<LinearConstraint>& cons);

// 2-SAT over boolean variables 0..n-1.
class TwoSat {
 public:
  explicit TwoSat(int n) : n_(n), adj_(2 * n) {}
  // (x == vx) or (y == vy)
  void add_clause(int x, bool vx, int y, bool vy);
  void add_unit(int x, bool vx) { add_clause(x, vx, x, vx); }
  std::optional<std::vector<bool>> solve() const;

 private:
  int lit(int x, bool v) const { return 2 * x + (v ? 0 : 1); }
  int n_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace popmatch
