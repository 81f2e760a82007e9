#ifndef TEQ_SOLVER_EXACT_HPP
#define TEQ_SOLVER_EXACT_HPP

#include <optional>
#include <string>

#include "teq/flow.hpp"

namespace teq {

struct exact_limits {
  // bound on the candidate saturated edges (see solve_exact); the subset
  // space is exponential in this number, so failure is explicit, not silent
  int max_saturated_candidates = 24;
  std::size_t path_cap = 1'000'000;  // combined strategy count
  bool forbid_outside = false;       // also require f_{i,outside} = 0
  int jobs = 1;
};

enum class exact_outcome { equilibrium, no_equilibrium, resource_limit };

struct exact_result {
  exact_outcome outcome = exact_outcome::no_equilibrium;
  std::optional<flow> solution;
  std::string limit_reason;
  std::uint64_t subsets_tested = 0;
};

// p is dominated under the saturated set: some cheaper strategy q boards
// only vehicles that are unsaturated or already ridden by p.
bool is_blocked_path(const instance& inst, int i, const strategy& p,
                     const std::vector<std::int32_t>& saturated);

// A point of the linear system for the guessed saturated set: saturation
// equalities, capacities, demands, and forced zeros on blocked strategies.
// Any returned flow is an equilibrium.
std::optional<flow> feasibility(const instance& inst,
                                const std::vector<std::int32_t>& saturated,
                                std::size_t path_cap = 1'000'000,
                                bool forbid_outside = false);

// Iterates saturated-set guesses by cardinality, then index order, over the
// driving edges that some strategy boards into and that can reach capacity
// at all (smaller guesses cannot block more paths, so restricting to these
// candidates loses no equilibria). Returns the first feasible flow, or a
// non-existence certificate after exhausting the subsets.
exact_result solve_exact(const instance& inst, const exact_limits& limits = {});

struct cost_range_result {
  bool resource_limit = false;
  std::string limit_reason;
  bool any = false;  // no equilibrium when false
  rational min_cost;
  rational max_cost;
  std::uint64_t subsets_tested = 0;
};

// Minimum and maximum social cost over all equilibria (per-subset LPs,
// no early exit).
cost_range_result enumerate_equilibrium_costs(const instance& inst,
                                              const exact_limits& limits = {});

}  // namespace teq

#endif
