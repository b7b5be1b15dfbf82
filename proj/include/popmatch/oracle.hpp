#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "popmatch/core.hpp"

namespace popmatch::oracle {

struct Budget {
  int max_nodes = 12;
  std::size_t max_matchings = 10'000'000;
};

// All matchings including the empty one, in canonical edge-set order.
std::vector<Matching> enumerate_matchings(const Instance& inst, const Budget& budget = {});

struct Flags {
  bool stable = false;
  bool popular = false;
  bool dominant = false;
  bool strongly_dominant = false;
};

struct Classification {
  std::vector<Matching> matchings;
  std::vector<Flags> flags;

  std::vector<Matching> with(bool Flags::*flag) const;
};

// Vote-count definitions checked against every other matching.
bool popular_against(const Instance& inst, const Matching& m, const std::vector<Matching>& all);
bool dominant_against(const Instance& inst, const Matching& m, const std::vector<Matching>& all);
// Exhaustive search over all (L, R) splits of the node set.
bool strongly_dominant_by_partition(const Instance& inst, const Matching& m);

Classification classify(const Instance& inst, const Budget& budget = {}, int jobs = 1);
std::vector<Matching> popular_matchings(const Instance& inst, const Budget& budget = {}, int jobs = 1);
std::vector<Matching> dominant_matchings(const Instance& inst, const Budget& budget = {}, int jobs = 1);

enum class Objective { min_cost_popular, max_weight_popular };

// Optimum over the popular set; ties go to the earliest matching in canonical order.
std::optional<std::pair<Matching, Rational>> optimize(const Instance& inst, Objective obj,
                                                      const Budget& budget = {}, int jobs = 1);

// First popular matching (canonical order) containing E1, avoiding E0,
// covering U1 and leaving U0 unmatched.
std::optional<Matching> pmffe(const Instance& inst, const std::vector<int>& e0, const std::vector<int>& e1,
                              const std::vector<int>& u0, const std::vector<int>& u1,
                              const Budget& budget = {}, int jobs = 1);

}  // namespace popmatch::oracle
