#include "popmatch/lp.hpp"

#include <algorithm>

namespace popmatch {

std::optional<std::vector<Rational>> lp_feasible(int num_vars, const std::vector<LinearConstraint>& cons) {
  const int m = static_cast<int>(cons.size());
  // Column layout: originals, then one slack/surplus per inequality, then artificials.
  int slack_cols = 0;
  for (const auto& c : cons)
    if (c.rel != Relation::eq) ++slack_cols;
  std::vector<int> slack_of(m, -1), art_of(m, -1);
  std::vector<int> sign(m, 1);
  std::vector<Relation> rel(m);
  int next = num_vars;
  for (int i = 0; i < m; ++i) {
    rel[i] = cons[i].rel;
    if (cons[i].rhs < 0) {
      sign[i] = -1;
      if (rel[i] == Relation::le)
        rel[i] = Relation::ge;
      else if (rel[i] == Relation::ge)
        rel[i] = Relation::le;
    }
    if (rel[i] != Relation::eq) slack_of[i] = next++;
  }
  const int first_art = next;
  for (int i = 0; i < m; ++i)
    if (rel[i] != Relation::le) art_of[i] = next++;
  const int cols = next;
  const int rhs = cols;

  std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(cols + 1, Rational(0)));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (const auto& [var, coef] : cons[i].terms) t[i][var] += sign[i] * coef;
    t[i][rhs] = sign[i] * cons[i].rhs;
    if (slack_of[i] >= 0) t[i][slack_of[i]] = rel[i] == Relation::le ? 1 : -1;
    if (art_of[i] >= 0) {
      t[i][art_of[i]] = 1;
      basis[i] = art_of[i];
    } else {
      basis[i] = slack_of[i];
    }
  }
  // Objective row: minimise the artificial sum; entries are reduced-cost gains.
  for (int i = 0; i < m; ++i) {
    if (art_of[i] < 0) continue;
    for (int j = 0; j <= cols; ++j)
      if (j < first_art || j == rhs) t[m][j] += t[i][j];
  }

  while (true) {
    int enter = -1;
    for (int j = 0; j < first_art; ++j)
      if (t[m][j] > 0) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    Rational best;
    for (int i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][rhs] / t[i][enter];
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase one
    Rational piv = t[leave][enter];
    for (int j = 0; j <= cols; ++j) t[leave][j] /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      Rational f = t[i][enter];
      for (int j = 0; j <= cols; ++j)
        if (t[leave][j] != 0) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  if (t[m][rhs] != 0) return std::nullopt;
  std::vector<Rational> x(num_vars, Rational(0));
  for (int i = 0; i < m; ++i)
    if (basis[i] < num_vars) x[basis[i]] = t[i][rhs];
  return x;
}

void TwoSat::add_clause(int x, bool vx, int y, bool vy) {
  adj_[lit(x, !vx)].push_back(lit(y, vy));
  adj_[lit(y, !vy)].push_back(lit(x, vx));
}

std::optional<std::vector<bool>> TwoSat::solve() const {
  const int n = 2 * n_;
  // Kosaraju: components come out in topological order of the condensation.
  std::vector<std::vector<int>> radj(n);
  for (int u = 0; u < n; ++u)
    for (int v : adj_[u]) radj[v].push_back(u);
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<int, std::size_t>> st{{s, 0}};
    seen[s] = 1;
    while (!st.empty()) {
      auto& [u, i] = st.back();
      if (i < adj_[u].size()) {
        int v = adj_[u][i++];
        if (!seen[v]) {
          seen[v] = 1;
          st.push_back({v, 0});
        }
      } else {
        order.push_back(u);
        st.pop_back();
      }
    }
  }
  std::vector<int> comp(n, -1);
  int c = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<int> st{*it};
    comp[*it] = c;
    while (!st.empty()) {
      int u = st.back();
      st.pop_back();
      for (int v : radj[u])
        if (comp[v] < 0) {
          comp[v] = c;
          st.push_back(v);
        }
    }
    ++c;
  }
  std::vector<bool> value(n_);
  for (int x = 0; x < n_; ++x) {
    if (comp[lit(x, true)] == comp[lit(x, false)]) return std::nullopt;
    value[x] = comp[lit(x, true)] > comp[lit(x, false)];
  }
  return value;
}

}  // namespace popmatch
