#include "pinlab/simplex.hpp"

#include <cstddef>
#include <stdexcept>

namespace pinlab {
namespace {

struct Tableau {
  // rows of the constraint matrix, one extra column for the rhs
  std::vector<std::vector<Rational>> t;
  std::vector<int> basis;
  int cols = 0;

  Rational& at(int i, int j) { return t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

  void pivot(int pr, int pc) {
    auto& row = t[static_cast<std::size_t>(pr)];
    const Rational piv = row[static_cast<std::size_t>(pc)];
    for (auto& v : row) v /= piv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (static_cast<int>(i) == pr) continue;
      const Rational f = t[i][static_cast<std::size_t>(pc)];
      if (f == 0) continue;
      for (int j = 0; j <= cols; ++j)
        t[i][static_cast<std::size_t>(j)] -= f * row[static_cast<std::size_t>(j)];
    }
    basis[static_cast<std::size_t>(pr)] = pc;
  }
};

// Runs Bland's rule on the given cost row until optimal or unbounded.
// cost[j] holds the reduced cost of column j; cost[cols] the negated value.
LpStatus optimize(Tableau& tab, std::vector<Rational>& cost,
                  const std::vector<bool>& allowed) {
  const int m = static_cast<int>(tab.t.size());
  for (;;) {
    int enter = -1;
    for (int j = 0; j < tab.cols; ++j) {
      if (!allowed[static_cast<std::size_t>(j)]) continue;
      if (cost[static_cast<std::size_t>(j)] < 0) { enter = j; break; }
    }
    if (enter < 0) return LpStatus::Optimal;

    int leave = -1;
    Rational best = 0;
    for (int i = 0; i < m; ++i) {
      const Rational& coeff = tab.at(i, enter);
      if (coeff <= 0) continue;
      Rational ratio = tab.at(i, tab.cols) / coeff;
      if (leave < 0 || ratio < best ||
          (ratio == best && tab.basis[static_cast<std::size_t>(i)] <
                                tab.basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) return LpStatus::Unbounded;

    tab.pivot(leave, enter);
    const Rational f = cost[static_cast<std::size_t>(enter)];
    if (f != 0) {
      for (int j = 0; j <= tab.cols; ++j)
        cost[static_cast<std::size_t>(j)] -=
            f * tab.at(leave, j);
    }
  }
}

}  // namespace

LpResult lp_minimize(int nvars, const std::vector<Rational>& objective,
                     const std::vector<LpRow>& rows) {
  if (static_cast<int>(objective.size()) != nvars)
    throw std::invalid_argument("lp_minimize: objective size mismatch");
  for (const auto& r : rows)
    if (static_cast<int>(r.a.size()) != nvars)
      throw std::invalid_argument("lp_minimize: row size mismatch");

  const int m = static_cast<int>(rows.size());

  // Column layout: original vars, then one slack/surplus per inequality,
  // then one artificial per row that needs it.
  int nslack = 0;
  for (const auto& r : rows)
    if (r.rel != LpRel::Eq) ++nslack;

  std::vector<int> art_col(static_cast<std::size_t>(m), -1);
  std::vector<int> slack_col(static_cast<std::size_t>(m), -1);

  Tableau tab;
  tab.t.assign(static_cast<std::size_t>(m), {});
  tab.basis.assign(static_cast<std::size_t>(m), -1);

  // First pass decides the column count.
  int col = nvars;
  for (int i = 0; i < m; ++i) {
    if (rows[static_cast<std::size_t>(i)].rel != LpRel::Eq)
      slack_col[static_cast<std::size_t>(i)] = col++;
  }
  const int first_art = col;
  for (int i = 0; i < m; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    const bool rhs_neg = r.rhs < 0;
    LpRel rel = r.rel;
    if (rhs_neg && rel != LpRel::Eq) rel = (rel == LpRel::Le) ? LpRel::Ge : LpRel::Le;
    // After normalization a <= row carries its slack as the basic column;
    // everything else needs an artificial.
    if (rel != LpRel::Le) art_col[static_cast<std::size_t>(i)] = col++;
  }
  tab.cols = col;

  for (int i = 0; i < m; ++i) {
    auto& trow = tab.t[static_cast<std::size_t>(i)];
    trow.assign(static_cast<std::size_t>(tab.cols) + 1, Rational(0));
    const auto& r = rows[static_cast<std::size_t>(i)];
    const int sgn = (r.rhs < 0) ? -1 : 1;
    for (int j = 0; j < nvars; ++j)
      trow[static_cast<std::size_t>(j)] = sgn * r.a[static_cast<std::size_t>(j)];
    trow[static_cast<std::size_t>(tab.cols)] = sgn * r.rhs;
    if (slack_col[static_cast<std::size_t>(i)] >= 0) {
      LpRel rel = r.rel;
      if (sgn < 0) rel = (rel == LpRel::Le) ? LpRel::Ge : LpRel::Le;
      trow[static_cast<std::size_t>(slack_col[static_cast<std::size_t>(i)])] =
          (rel == LpRel::Le) ? 1 : -1;
    }
    if (art_col[static_cast<std::size_t>(i)] >= 0) {
      trow[static_cast<std::size_t>(art_col[static_cast<std::size_t>(i)])] = 1;
      tab.basis[static_cast<std::size_t>(i)] = art_col[static_cast<std::size_t>(i)];
    } else {
      tab.basis[static_cast<std::size_t>(i)] = slack_col[static_cast<std::size_t>(i)];
    }
  }

  std::vector<bool> allowed(static_cast<std::size_t>(tab.cols), true);

  // Phase one: minimize the sum of artificials.
  if (first_art < tab.cols) {
    std::vector<Rational> cost(static_cast<std::size_t>(tab.cols) + 1, Rational(0));
    for (int i = 0; i < m; ++i) {
      if (art_col[static_cast<std::size_t>(i)] < 0) continue;
      for (int j = 0; j <= tab.cols; ++j) {
        if (j >= first_art && j < tab.cols) continue;
        cost[static_cast<std::size_t>(j)] -= tab.at(i, j);
      }
    }
    optimize(tab, cost, allowed);
    if (-cost[static_cast<std::size_t>(tab.cols)] != 0)
      return {LpStatus::Infeasible, 0, {}};
    // Drive any artificial still basic (at zero level) out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] < first_art) continue;
      int pc = -1;
      for (int j = 0; j < first_art; ++j)
        if (tab.at(i, j) != 0) { pc = j; break; }
      if (pc >= 0) tab.pivot(i, pc);
      // A row with no eligible pivot is redundant; its artificial stays
      // basic at zero, which phase two leaves untouched.
    }
    for (int j = first_art; j < tab.cols; ++j)
      allowed[static_cast<std::size_t>(j)] = false;
  }

  // Phase two.
  std::vector<Rational> cost(static_cast<std::size_t>(tab.cols) + 1, Rational(0));
  for (int j = 0; j < nvars; ++j)
    cost[static_cast<std::size_t>(j)] = objective[static_cast<std::size_t>(j)];
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis[static_cast<std::size_t>(i)];
    const Rational f = cost[static_cast<std::size_t>(b)];
    if (f == 0) continue;
    for (int j = 0; j <= tab.cols; ++j)
      cost[static_cast<std::size_t>(j)] -= f * tab.at(i, j);
  }
  const LpStatus st = optimize(tab, cost, allowed);
  if (st == LpStatus::Unbounded) return {LpStatus::Unbounded, 0, {}};

  LpResult res;
  res.status = LpStatus::Optimal;
  res.x.assign(static_cast<std::size_t>(nvars), Rational(0));
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis[static_cast<std::size_t>(i)];
    if (b < nvars) res.x[static_cast<std::size_t>(b)] = tab.at(i, tab.cols);
  }
  res.value = 0;
  for (int j = 0; j < nvars; ++j)
    res.value += objective[static_cast<std::size_t>(j)] * res.x[static_cast<std::size_t>(j)];
  return res;
}

}  // namespace pinlab
