#include "teq/demand.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace teq {

rational arrival_cost(const commodity& c, time_sec t) {
  rational cost(0);
  if (t > c.target_arrival)
    cost += c.gamma_late * rational(static_cast<long>(t - c.target_arrival));
  if (t < c.target_arrival)
    cost += c.gamma_early * rational(static_cast<long>(c.target_arrival - t));
  return cost;
}

rational elastic_group::volume_at(const rational& cost) const {
  assert(!elastic.empty());
  rational value = elastic.front().second;
  for (const auto& [c, v] : elastic) {
    if (c <= cost) value = v;
    else break;
  }
  return value;
}

rational elastic_group::pi_max() const {
  assert(!elastic.empty());
  return elastic.back().first;
}

bool is_fdt(const instance& inst) {
  for (const auto& c : inst.commodities)
    if (c.window_lo != c.window_hi) return false;
  return true;
}

instance fdt_transform(const instance& inst) {
  instance out;
  out.graph = inst.graph;
  out.commodities = inst.commodities;
  for (auto& c : out.commodities) {
    bool singleton = c.window_lo == c.window_hi;
    if (!singleton && c.beta != 0)
      throw std::invalid_argument("commodity '" + c.id +
                                  "': departure time choice with beta > 0 has no "
                                  "fixed-departure-time equivalent");
    time_sec start = c.window_lo;
    if (!singleton) {
      // earliest eligible on-platform time
      bool found = false;
      if (c.origin >= 0)
        for (auto v : inst.graph.platform_nodes[c.origin]) {
          auto t = inst.graph.nodes[v].time;
          if (t >= c.window_lo && t <= c.window_hi) {
            start = t;
            found = true;
            break;
          }
        }
      if (!found) start = c.window_lo;
    }
    // shift every strategy cost (including the outside option) by the same
    // commodity constant -beta * (T - start)
    c.outside_cost -= c.beta * rational(static_cast<long>(c.target_arrival - start));
    c.gamma_late += c.beta;
    c.gamma_early -= c.beta;
    if (c.gamma_early < 0) c.rewards_earliness = true;
    c.beta = 0;
    c.window_lo = c.window_hi = start;
  }
  return out;
}

std::vector<rational> enumerate_distinct_costs(const elastic_group& grp,
                                               const time_expanded_graph& g,
                                               std::size_t cap, bool* truncated) {
  if (cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (truncated) *truncated = false;

  // reachable (start-time, node) pairs; the cost of a path only depends on
  // its start and arrival times
  std::vector<std::set<time_sec>> starts(g.nodes.size());
  if (grp.origin >= 0)
    for (auto v : g.platform_nodes[grp.origin]) {
      auto t = g.nodes[v].time;
      if (t >= grp.window_lo && t <= grp.window_hi) starts[v].insert(t);
    }
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(g.nodes.size()); ++v)
    for (auto e : g.out_edges[v])
      starts[g.edges[e].head].insert(starts[v].begin(), starts[v].end());

  commodity proxy;
  proxy.target_arrival = grp.target_arrival;
  proxy.gamma_late = grp.gamma_late;
  proxy.gamma_early = grp.gamma_early;

  std::set<rational> costs;
  if (grp.destination >= 0)
    for (auto w : g.platform_nodes[grp.destination]) {
      auto arr = g.nodes[w].time;
      for (auto s : starts[w])
        costs.insert(grp.beta * rational(static_cast<long>(arr - s)) + arrival_cost(proxy, arr));
    }

  std::vector<rational> out(costs.begin(), costs.end());
  if (out.size() > cap) {
    out.resize(cap);
    if (truncated) *truncated = true;
  }
  return out;
}

std::vector<commodity> discretize_elastic(const elastic_group& grp,
                                          const std::vector<rational>& costs) {
  for (std::size_t j = 1; j < costs.size(); ++j)
    if (!(costs[j - 1] < costs[j]))
      throw std::invalid_argument("costs must be strictly increasing");

  std::vector<commodity> out;
  auto pi_max = grp.pi_max();
  std::size_t k = costs.size();
  for (std::size_t j = 0; j <= k; ++j) {
    rational lo = j == 0 ? rational(0) : costs[j - 1];
    rational hi = j == k ? pi_max : costs[j];
    rational volume = grp.volume_at(lo) - grp.volume_at(hi);
    if (volume == 0) continue;
    commodity c;
    c.id = grp.id + "_" + std::to_string(j + 1);
    c.origin = grp.origin;
    c.destination = grp.destination;
    c.window_lo = grp.window_lo;
    c.window_hi = grp.window_hi;
    c.target_arrival = grp.target_arrival;
    c.beta = grp.beta;
    c.gamma_late = grp.gamma_late;
    c.gamma_early = grp.gamma_early;
    c.demand = volume;
    c.outside_cost = (lo + hi) / 2;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace teq
