#pragma once

// Exact rational linear programming, used for constraint classification.
// Problems here have at most a dozen variables, so a dense two-phase tableau
// with Bland's rule is plenty and terminates exactly.

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace pinlab {

using Rational = boost::multiprecision::cpp_rational;

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class LpRel { Le, Eq, Ge };

struct LpRow {
  std::vector<Rational> a;
  LpRel rel = LpRel::Le;
  Rational rhs = 0;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value = 0;
  std::vector<Rational> x;
};

// Minimizes objective . x subject to the rows and x >= 0.
LpResult lp_minimize(int nvars, const std::vector<Rational>& objective,
                     const std::vector<LpRow>& rows);

}  // namespace pinlab
