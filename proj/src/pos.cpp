#include "teq/pos.hpp"

#include "teq/sysopt.hpp"

namespace teq {

pos_result price_of_stability(const instance& inst, const exact_limits& limits) {
  pos_result res;
  res.sysopt_cost = social_cost(solve_system_optimum(inst));
  res.equilibria = enumerate_equilibrium_costs(inst, limits);
  if (res.equilibria.resource_limit || !res.equilibria.any) return res;
  if (res.sysopt_cost == 0) {
    if (res.equilibria.min_cost == 0) res.value = rational(1);
    return res;
  }
  res.value = res.equilibria.min_cost / res.sysopt_cost;
  return res;
}

}  // namespace teq
