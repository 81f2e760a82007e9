#ifndef TEQ_DEMAND_HPP
#define TEQ_DEMAND_HPP

#include <string>
#include <vector>

#include "teq/network.hpp"
#include "teq/rational.hpp"

namespace teq {

// A demand atom. Routing strategies of a commodity are the paths from an
// on-platform node of `origin` with time in [window_lo, window_hi] to an
// on-platform node of `destination`, plus the constant-cost outside option.
struct commodity {
  std::string id;
  std::int32_t origin = -1;       // station index
  std::int32_t destination = -1;  // station index
  time_sec window_lo = 0;
  time_sec window_hi = 0;
  time_sec target_arrival = 0;
  rational beta;         // cost per second of travel time
  rational gamma_late;   // cost per second of late arrival
  rational gamma_early;  // cost per second of early arrival
  rational demand;
  rational outside_cost;
  // set by fdt_transform when gamma_early - beta went negative
  bool rewards_earliness = false;
};

// A group with elastic demand; `elastic` is a right-continuous step function
// cost -> willing volume given as breakpoints, last volume must be zero.
struct elastic_group {
  std::string id;
  std::int32_t origin = -1;
  std::int32_t destination = -1;
  time_sec window_lo = 0;
  time_sec window_hi = 0;
  time_sec target_arrival = 0;
  rational beta, gamma_late, gamma_early;
  std::vector<std::pair<rational, rational>> elastic;  // (cost, volume)

  rational volume_at(const rational& cost) const;
  rational pi_max() const;  // first cost with volume zero
};

struct instance {
  time_expanded_graph graph;
  std::vector<commodity> commodities;
};

// gamma+ * max(0, t - T) + gamma- * max(0, T - t), using the commodity's
// stored coefficients.
rational arrival_cost(const commodity& c, time_sec t);

bool is_fdt(const instance& inst);

// Collapses every departure window to its earliest eligible on-platform time
// and folds beta into the arrival penalties (lateness gamma+ + beta,
// earliness gamma- - beta); outside costs are shifted by the same
// commodity constant so all strategy comparisons are preserved.
// Requires singleton windows or beta = 0 per commodity.
instance fdt_transform(const instance& inst);

// Distinct strategy costs of a group on the given graph, ascending.
// Truncates at `cap` entries and reports it.
std::vector<rational> enumerate_distinct_costs(const elastic_group& grp,
                                               const time_expanded_graph& g,
                                               std::size_t cap, bool* truncated);

// One commodity per willingness band between consecutive distinct costs;
// outside costs at band midpoints, zero-demand bands dropped.
std::vector<commodity> discretize_elastic(const elastic_group& grp,
                                          const std::vector<rational>& costs);

}  // namespace teq

#endif
