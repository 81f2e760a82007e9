#ifndef TEQ_POS_HPP
#define TEQ_POS_HPP

#include "teq/solver_exact.hpp"

namespace teq {

struct pos_result {
  rational sysopt_cost;
  cost_range_result equilibria;
  // best-equilibrium social cost over the system optimum; empty when no
  // equilibrium exists or a resource limit was hit. 0/0 is reported as 1.
  std::optional<rational> value;
};

pos_result price_of_stability(const instance& inst, const exact_limits& limits = {});

}  // namespace teq

#endif
