#include "teq/lp.hpp"

#include <cassert>
#include <stdexcept>

namespace teq {

namespace {

class simplex {
 public:
  simplex(const lp_problem& p) : n_(p.num_vars), m_(static_cast<int>(p.rows.size())) {
    num_slack_ = 0;
    for (const auto& row : p.rows)
      if (row.rel == '<') ++num_slack_;
      else if (row.rel != '=') throw std::invalid_argument("row relation must be '<' or '='");
    cols_ = n_ + num_slack_ + m_;  // structural, slack, artificial
    a_.assign(m_, std::vector<rational>(cols_, rational(0)));
    b_.assign(m_, rational(0));
    basis_.assign(m_, -1);
    row_flipped_.assign(m_, false);

    int slack = n_;
    for (int r = 0; r < m_; ++r) {
      const auto& row = p.rows[r];
      for (const auto& [j, v] : row.coeffs) {
        if (j < 0 || j >= n_) throw std::invalid_argument("lp coefficient out of range");
        a_[r][j] += v;
      }
      b_[r] = row.rhs;
      int srow = -1;
      if (row.rel == '<') {
        srow = slack++;
        a_[r][srow] = 1;
      }
      if (b_[r] < 0) {
        row_flipped_[r] = true;
        for (auto& v : a_[r]) v = -v;
        b_[r] = -b_[r];
      }
      a_[r][artificial(r)] = 1;
      if (srow >= 0 && !row_flipped_[r]) basis_[r] = srow;
      else basis_[r] = artificial(r);
    }

    // phase 1: minimize the artificial sum
    std::vector<rational> d(cols_, rational(0));
    for (int r = 0; r < m_; ++r) d[artificial(r)] = 1;
    set_objective(d, /*bar_artificials=*/false);
    run();
    if (obj_ > 0) {
      status_ = lp_status::infeasible;
      return;
    }
    // pivot leftover artificials out of the (degenerate) basis
    for (int r = 0; r < m_; ++r) {
      if (basis_[r] < first_artificial()) continue;
      int enter = -1;
      for (int j = 0; j < first_artificial(); ++j)
        if (a_[r][j] != 0) {
          enter = j;
          break;
        }
      if (enter >= 0) pivot(r, enter);
      else dead_row_.push_back(r);  // redundant all-zero row
    }
    status_ = lp_status::optimal;
  }

  void optimize(const std::vector<rational>& c) {
    assert(status_ == lp_status::optimal);
    std::vector<rational> full(cols_, rational(0));
    for (int j = 0; j < n_ && j < static_cast<int>(c.size()); ++j) full[j] = c[j];
    set_objective(full, /*bar_artificials=*/true);
    run();
  }

  lp_solution extract() const {
    lp_solution sol;
    sol.status = status_;
    if (status_ != lp_status::optimal) return sol;
    sol.x.assign(n_, rational(0));
    for (int r = 0; r < m_; ++r)
      if (basis_[r] < n_) sol.x[basis_[r]] = b_[r];
    sol.objective = obj_;
    sol.row_duals.assign(m_, rational(0));
    for (int r = 0; r < m_; ++r) {
      // reduced cost under the artificial identity column of row r
      rational y = cost_[artificial(r)] - reduced_[artificial(r)];
      sol.row_duals[r] = row_flipped_[r] ? rational(-y) : y;
    }
    return sol;
  }

  lp_status status() const { return status_; }

 private:
  int n_, m_, num_slack_ = 0, cols_ = 0;
  std::vector<std::vector<rational>> a_;
  std::vector<rational> b_;
  std::vector<int> basis_;
  std::vector<bool> row_flipped_;
  std::vector<int> dead_row_;
  std::vector<rational> cost_, reduced_;
  rational obj_;
  bool bar_artificials_ = false;
  lp_status status_ = lp_status::optimal;

  int first_artificial() const { return n_ + num_slack_; }
  int artificial(int r) const { return n_ + num_slack_ + r; }

  bool dead(int r) const {
    for (auto d : dead_row_)
      if (d == r) return true;
    return false;
  }

  void set_objective(std::vector<rational> c, bool bar_artificials) {
    cost_ = std::move(c);
    bar_artificials_ = bar_artificials;
    reduced_ = cost_;
    obj_ = 0;
    for (int r = 0; r < m_; ++r) {
      if (cost_[basis_[r]] == 0) continue;
      const rational& cb = cost_[basis_[r]];
      for (int j = 0; j < cols_; ++j)
        if (a_[r][j] != 0) reduced_[j] -= cb * a_[r][j];
      obj_ += cb * b_[r];
    }
  }

  void pivot(int row, int col) {
    rational inv = 1 / a_[row][col];
    if (inv != 1)
      for (int j = 0; j < cols_; ++j)
        if (a_[row][j] != 0) a_[row][j] *= inv;
    if (inv != 1) b_[row] *= inv;
    a_[row][col] = 1;  // exact
    for (int r = 0; r < m_; ++r) {
      if (r == row || a_[r][col] == 0) continue;
      rational factor = a_[r][col];
      for (int j = 0; j < cols_; ++j)
        if (a_[row][j] != 0) a_[r][j] -= factor * a_[row][j];
      a_[r][col] = 0;
      b_[r] -= factor * b_[row];
    }
    if (reduced_[col] != 0) {
      rational factor = reduced_[col];
      for (int j = 0; j < cols_; ++j)
        if (a_[row][j] != 0) reduced_[j] -= factor * a_[row][j];
      reduced_[col] = 0;
      obj_ += factor * b_[row];
    }
    basis_[row] = col;
  }

  void run() {
    for (;;) {
      // Bland: smallest-index improving column
      int enter = -1;
      for (int j = 0; j < cols_; ++j) {
        if (bar_artificials_ && j >= first_artificial()) break;
        if (reduced_[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      rational best;
      for (int r = 0; r < m_; ++r) {
        if (dead(r) || a_[r][enter] <= 0) continue;
        rational ratio = b_[r] / a_[r][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = std::move(ratio);
        }
      }
      if (leave < 0) {
        status_ = lp_status::unbounded;
        return;
      }
      pivot(leave, enter);
    }
  }
};

}  // namespace

lp_solution lp_solve(const lp_problem& problem) {
  simplex s(problem);
  if (s.status() != lp_status::optimal) return s.extract();
  if (!problem.objective.empty()) s.optimize(problem.objective);
  return s.extract();
}

lp_solution lp_feasible(const lp_problem& problem) {
  simplex s(problem);
  if (s.status() != lp_status::optimal) return s.extract();
  s.optimize(std::vector<rational>());
  return s.extract();
}

}  // namespace teq
