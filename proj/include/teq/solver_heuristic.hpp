#ifndef TEQ_SOLVER_HEURISTIC_HPP
#define TEQ_SOLVER_HEURISTIC_HPP

#include <cstdint>
#include <map>
#include <string>

#include "teq/flow.hpp"

namespace teq {

// Sparse balanced change of path volumes: sum of deltas per commodity is 0.
class direction {
 public:
  direction() = default;
  explicit direction(std::size_t num_commodities) : deltas_(num_commodities) {}

  const std::map<strategy, rational>& deltas(int i) const { return deltas_[i]; }
  rational delta(int i, const strategy& p) const;
  void add(int i, const strategy& p, const rational& d);  // erases exact zeros
  bool empty() const;
  bool balanced() const;
  std::size_t num_commodities() const { return deltas_.size(); }

  direction& operator+=(const direction& other);
  // support+sign fingerprint used for cycle detection
  std::vector<std::tuple<int, strategy, int>> signature() const;

 private:
  std::vector<std::map<strategy, rational>> deltas_;
};

// Per-edge load change induced by the direction.
std::vector<rational> direction_edge_deltas(const instance& inst, const direction& d);

// Whether f + lambda*d stays feasible for small lambda > 0: no boarding edge
// may have a saturated successor gaining load while carrying or receiving
// boarders. Requires the support condition (d negative only on used paths).
bool is_feasible_direction(const flow& f, const direction& d);

// Redistributes offending volume onto the best alternatives that avoid
// saturated non-decreasing driving edges until the direction is feasible.
direction repair_direction(const flow& f, direction d);

// Largest lambda keeping f + lambda*d feasible.
rational max_step(const flow& f, const direction& d);

// Prefills cheapest uninterruptible paths (paths that only board a vehicle
// whose previous driving edge is already saturated); the heuristic never
// removes this flow.
flow fixed_initial_solution(const instance& inst);

// Routes the demand left open by the fixed initial solution by a social-cost
// LP with the prefilled loads subtracted from the capacities.
flow warm_start(const instance& inst, const flow& initial);

struct heuristic_config {
  double budget_secs = 60.0;
  std::int64_t iter_cap = 100'000;
  // max_regret deviates to the best available alternative; random picks a
  // uniform improving deviation (i, p, q) over all available alternatives
  enum class selection_rule { max_regret, random };
  selection_rule selection = selection_rule::max_regret;
  std::uint64_t seed = 0;
  int cycle_window = 64;  // 0 disables cycle detection and compression
  int restart_limit = 8;
  bool prefill = true;
  bool use_warm_start = true;
  bool check_invariants = true;
  std::size_t path_cap = 1'000'000;  // alternative enumeration in random mode
};

struct heuristic_trace_row {
  std::int64_t iter;
  int commodity;          // -1 for compressed steps
  rational regret;        // of the selected move
  rational lambda;
  rational mean_rho;
  std::optional<rational> p99_rho;
  rational social;
  std::string note;
};

struct heuristic_result {
  flow best;
  metrics_report best_metrics;
  bool equilibrium = false;
  std::int64_t iterations = 0;
  int restarts = 0;
  std::vector<heuristic_trace_row> trace;
};

// header: iter,selected_commodity,regret,lambda,mean_rho,p99_rho,social_cost
std::string trace_to_csv(const std::vector<heuristic_trace_row>& trace);

heuristic_result solve_heuristic(const instance& inst, const heuristic_config& config = {});

}  // namespace teq

#endif
