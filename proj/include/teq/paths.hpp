#ifndef TEQ_PATHS_HPP
#define TEQ_PATHS_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "teq/demand.hpp"

namespace teq {

// A strategy of a commodity: either the outside option or a path between
// on-platform nodes in the base graph (source/sink edges of the commodity
// extension are implicit). Paths that alight from a vehicle and re-board the
// same vehicle at the same platform node are excluded everywhere: they use
// the same driving edges at the same cost as the stay-on path and carry a
// superset of its boarding edges, so nothing is lost by canonicalizing.
struct strategy {
  bool outside = false;
  std::int32_t start_node = -1;
  std::int32_t end_node = -1;
  std::vector<std::int32_t> edges;

  friend bool operator==(const strategy&, const strategy&) = default;
  friend auto operator<=>(const strategy& a, const strategy& b) {
    if (auto c = (!a.outside) <=> (!b.outside); c != 0) return c;  // outside first
    if (auto c = a.start_node <=> b.start_node; c != 0) return c;
    return a.edges <=> b.edges;
  }

  bool uses_edge(std::int32_t e) const;
  std::vector<std::int32_t> driving_edges(const time_expanded_graph& g) const;
  std::vector<std::int32_t> boarding_edges(const time_expanded_graph& g) const;
};

strategy outside_strategy();

struct path_enumeration_overflow : std::runtime_error {
  std::size_t cap;
  explicit path_enumeration_overflow(std::size_t c)
      : std::runtime_error("strategy enumeration exceeded cap " + std::to_string(c)), cap(c) {}
};

// Eligible start platform nodes of commodity i, ascending.
std::vector<std::int32_t> eligible_sources(const instance& inst, int i);
std::vector<std::int32_t> destination_platforms(const instance& inst, int i);

time_sec strategy_arrival(const instance& inst, const strategy& p);

// pi_{i,p}: beta * tau_p + arrival penalties, or the outside cost.
rational path_cost(const instance& inst, int i, const strategy& p);

bool is_valid_strategy(const instance& inst, int i, const strategy& p);

// All strategies of commodity i including the outside option, canonical order.
std::vector<strategy> enumerate_strategies(const instance& inst, int i, std::size_t cap);

// The commodity extension of the base graph: source/sink eligibility plus the
// boarding-penalty constant M = (max uncongested strategy cost) + 1.
struct extended_graph {
  const instance* inst = nullptr;
  std::vector<std::vector<std::int32_t>> sources;
  std::vector<std::vector<std::int32_t>> sinks;
  rational penalty_m;
};

extended_graph extend_graph(const instance& inst);

// An edge of the extended graph G'.
struct gprime_edge {
  enum class kind { source, base, sink, outside };
  kind k = kind::base;
  std::int32_t base_edge = -1;  // for kind::base
  std::int32_t node = -1;       // platform endpoint for source/sink
};

// Discontinuous per-commodity edge cost; boarding edges jump to M when the
// succeeding driving edge is loaded above capacity.
rational edge_cost(const extended_graph& ext, int i, const gprime_edge& e,
                   const std::vector<rational>& edge_loads);

// Cheapest strategy of a commodity under filtered/adjusted costs.
struct strategy_query {
  const instance* inst = nullptr;
  int commodity = 0;
  bool include_outside = true;
  // boarding edges failing this predicate are removed from the subgraph
  std::function<bool(std::int32_t)> boarding_allowed;
  // driving edges failing this predicate are removed from the subgraph
  std::function<bool(std::int32_t)> driving_allowed;
  // added on boarding edges (0 or M terms for the liminf evaluation)
  std::function<rational(std::int32_t)> boarding_extra;
  // subtracted on driving edges (capacity duals in column pricing)
  std::function<rational(std::int32_t)> driving_adjust;
};

struct strategy_result {
  strategy path;
  rational cost;
};

// Ties are broken towards earliest arrival, then canonical edge order, with
// dwelling preferred over boarding so results are canonical strategies.
std::optional<strategy_result> shortest_strategy(const strategy_query& q);

// Most expensive alpha-omega path cost of commodity i (uncongested), used for M.
std::optional<rational> longest_strategy_cost(const instance& inst, int i);

}  // namespace teq

#endif
