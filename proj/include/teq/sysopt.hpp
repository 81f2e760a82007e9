#ifndef TEQ_SYSOPT_HPP
#define TEQ_SYSOPT_HPP

#include <functional>

#include "teq/flow.hpp"
#include "teq/lp.hpp"

namespace teq {

// Minimum social cost over all feasible flows, by column generation over a
// restricted master: every commodity keeps its outside column (so the master
// is always feasible) plus its unconstrained cheapest path; pricing adds
// negative-reduced-cost columns until optimality is certified exactly.
flow solve_system_optimum(const instance& inst);

// Best column of commodity i under the master duals: minimizes
// pi_{i,p} - sum of capacity duals on p's driving edges, minus the demand
// dual. Returns the column and its reduced cost.
strategy_result price_column(const instance& inst, int i, const rational& demand_dual,
                             const std::function<rational(std::int32_t)>& capacity_dual);

// Full-enumeration LP over all strategies; test oracle for column generation.
flow solve_system_optimum_full(const instance& inst, std::size_t path_cap = 1'000'000);

// System optimum for the demand not covered by frozen, with frozen's edge
// loads pre-subtracted from the capacities; returns frozen + the LP routing.
flow solve_system_optimum_residual(const instance& inst, const flow& frozen);

}  // namespace teq

#endif
