#ifndef TEQ_LP_HPP
#define TEQ_LP_HPP

#include <vector>

#include "teq/rational.hpp"

namespace teq {

// Exact rational linear programs: minimize c'x subject to sparse rows
// (coeffs . x) rel rhs with rel in {'<', '='} ('<' meaning <=), x >= 0.
// Saturation equalities must hold exactly, hence no floating point backend.
struct lp_row {
  std::vector<std::pair<int, rational>> coeffs;
  char rel = '<';
  rational rhs;
};

struct lp_problem {
  int num_vars = 0;
  std::vector<rational> objective;  // empty means feasibility only
  std::vector<lp_row> rows;
};

enum class lp_status { optimal, infeasible, unbounded };

struct lp_solution {
  lp_status status = lp_status::infeasible;
  std::vector<rational> x;
  rational objective;
  // y with reduced(c_j) = c_j - y . A_j for every column; one entry per row.
  std::vector<rational> row_duals;
};

// Two-phase primal simplex with Bland's anti-cycling rule.
lp_solution lp_solve(const lp_problem& problem);

// Phase 1 only: any feasible point.
lp_solution lp_feasible(const lp_problem& problem);

}  // namespace teq

#endif
