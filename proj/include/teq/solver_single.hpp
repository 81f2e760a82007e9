#ifndef TEQ_SOLVER_SINGLE_HPP
#define TEQ_SOLVER_SINGLE_HPP

#include "teq/flow.hpp"

namespace teq {

// p has priority over q: at the first driving edge shared by p and q whose
// boarding edge lies on exactly one of them, the boarding edge lies on q
// (q's particles board a vehicle p is already sitting in).
bool has_priority(const instance& inst, const strategy& p, const strategy& q);

// Priority-minimal path ending in end_node, restricted to alive edges:
// backward walk preferring non-boarding predecessors. The returned path has
// no conflicting edge whose boarding edge lies on it.
strategy minimal_path(const instance& inst, int i, const std::vector<char>& edge_alive,
                      std::int32_t end_node);

// Exact equilibrium for single-commodity fixed-departure-time instances by
// successively saturating cheapest priority-minimal paths. Uses at most |E|
// paths. check_invariants re-verifies every intermediate flow.
flow solve_single(const instance& inst, bool check_invariants = false);

// Reduction of a single-destination multi-commodity instance to one
// commodity: an artificial vehicle of capacity Q_i connects a super-source
// station to each commodity's departure node.
struct super_source_reduction {
  instance reduced;
  // maps a flow on the reduced instance back to the original commodities;
  // unrouted demand lands on the outside options
  flow map_back(const instance& original, const flow& reduced_flow) const;

  std::vector<std::string> artificial_trips;  // per original commodity
};

super_source_reduction super_source_reduce(const instance& inst);

}  // namespace teq

#endif
