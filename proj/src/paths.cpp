#include "teq/paths.hpp"

#include <algorithm>
#include <cassert>

namespace teq {

bool strategy::uses_edge(std::int32_t e) const {
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

std::vector<std::int32_t> strategy::driving_edges(const time_expanded_graph& g) const {
  std::vector<std::int32_t> out;
  for (auto e : edges)
    if (g.edges[e].kind == edge_kind::driving) out.push_back(e);
  return out;
}

std::vector<std::int32_t> strategy::boarding_edges(const time_expanded_graph& g) const {
  std::vector<std::int32_t> out;
  for (auto e : edges)
    if (g.edges[e].kind == edge_kind::boarding) out.push_back(e);
  return out;
}

strategy outside_strategy() {
  strategy s;
  s.outside = true;
  return s;
}

std::vector<std::int32_t> eligible_sources(const instance& inst, int i) {
  const auto& c = inst.commodities[i];
  std::vector<std::int32_t> out;
  if (c.origin < 0 || c.origin >= static_cast<std::int32_t>(inst.graph.platform_nodes.size()))
    return out;
  for (auto v : inst.graph.platform_nodes[c.origin]) {
    auto t = inst.graph.nodes[v].time;
    if (t >= c.window_lo && t <= c.window_hi) out.push_back(v);
  }
  return out;
}

std::vector<std::int32_t> destination_platforms(const instance& inst, int i) {
  const auto& c = inst.commodities[i];
  if (c.destination < 0 ||
      c.destination >= static_cast<std::int32_t>(inst.graph.platform_nodes.size()))
    return {};
  return inst.graph.platform_nodes[c.destination];
}

time_sec strategy_arrival(const instance& inst, const strategy& p) {
  assert(!p.outside);
  return inst.graph.nodes[p.end_node].time;
}

rational path_cost(const instance& inst, int i, const strategy& p) {
  const auto& c = inst.commodities[i];
  if (p.outside) return c.outside_cost;
  time_sec start = inst.graph.nodes[p.start_node].time;
  time_sec arr = inst.graph.nodes[p.end_node].time;
  return c.beta * rational(static_cast<long>(arr - start)) + arrival_cost(c, arr);
}

bool is_valid_strategy(const instance& inst, int i, const strategy& p) {
  const auto& c = inst.commodities[i];
  if (p.outside) return true;
  const auto& g = inst.graph;
  if (p.start_node < 0 || p.start_node >= static_cast<std::int32_t>(g.nodes.size())) return false;
  if (p.end_node < 0 || p.end_node >= static_cast<std::int32_t>(g.nodes.size())) return false;
  const auto& sn = g.nodes[p.start_node];
  const auto& en = g.nodes[p.end_node];
  if (sn.kind != node_kind::on_platform || sn.station != c.origin) return false;
  if (sn.time < c.window_lo || sn.time > c.window_hi) return false;
  if (en.kind != node_kind::on_platform || en.station != c.destination) return false;
  auto v = p.start_node;
  for (auto e : p.edges) {
    if (e < 0 || e >= static_cast<std::int32_t>(g.edges.size())) return false;
    if (g.edges[e].tail != v) return false;
    v = g.edges[e].head;
  }
  return v == p.end_node;
}

std::vector<strategy> enumerate_strategies(const instance& inst, int i, std::size_t cap) {
  const auto& g = inst.graph;
  const auto& c = inst.commodities[i];
  std::vector<strategy> out;
  out.push_back(outside_strategy());

  std::vector<std::int32_t> path;
  auto record = [&](std::int32_t start, std::int32_t end) {
    if (out.size() >= cap + 1) throw path_enumeration_overflow(cap);
    strategy s;
    s.start_node = start;
    s.end_node = end;
    s.edges = path;
    out.push_back(std::move(s));
  };

  std::function<void(std::int32_t, std::int32_t, std::int32_t)> dfs =
      [&](std::int32_t start, std::int32_t v, std::int32_t entered_by) {
        const auto& n = g.nodes[v];
        if (n.kind == node_kind::on_platform && n.station == c.destination) record(start, v);
        for (auto e : g.out_edges[v]) {
          const auto& ed = g.edges[e];
          if (entered_by >= 0 && g.edges[entered_by].kind == edge_kind::alighting &&
              ed.kind == edge_kind::boarding && ed.trip == g.edges[entered_by].trip)
            continue;  // re-boarding the vehicle just left
          path.push_back(e);
          dfs(start, ed.head, e);
          path.pop_back();
        }
      };
  for (auto v : eligible_sources(inst, i)) dfs(v, v, -1);
  std::sort(out.begin(), out.end());
  return out;
}

extended_graph extend_graph(const instance& inst) {
  extended_graph ext;
  ext.inst = &inst;
  rational max_cost(0);
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    ext.sources.push_back(eligible_sources(inst, i));
    ext.sinks.push_back(destination_platforms(inst, i));
    if (inst.commodities[i].outside_cost > max_cost)
      max_cost = inst.commodities[i].outside_cost;
    if (auto longest = longest_strategy_cost(inst, i); longest && *longest > max_cost)
      max_cost = *longest;
  }
  ext.penalty_m = max_cost + 1;
  return ext;
}

rational edge_cost(const extended_graph& ext, int i, const gprime_edge& e,
                   const std::vector<rational>& edge_loads) {
  const auto& inst = *ext.inst;
  const auto& c = inst.commodities[i];
  switch (e.k) {
    case gprime_edge::kind::source:
      return rational(0);
    case gprime_edge::kind::outside:
      return c.outside_cost;
    case gprime_edge::kind::sink:
      return arrival_cost(c, inst.graph.nodes[e.node].time);
    case gprime_edge::kind::base: {
      const auto& ed = inst.graph.edges[e.base_edge];
      if (ed.kind == edge_kind::boarding) {
        auto succ = inst.graph.boarding_successor[e.base_edge];
        return edge_loads[succ] <= inst.graph.edges[succ].capacity ? rational(0)
                                                                   : ext.penalty_m;
      }
      return c.beta * rational(static_cast<long>(ed.tau));
    }
  }
  return rational(0);
}

namespace {

struct dp_state {
  bool reachable = false;
  rational dist;
  std::int32_t parent_edge = -1;  // -1: starts here
};

}  // namespace

std::optional<strategy_result> shortest_strategy(const strategy_query& q) {
  const auto& inst = *q.inst;
  const auto& g = inst.graph;
  const auto& c = inst.commodities[q.commodity];

  std::vector<dp_state> dp(g.nodes.size());
  for (auto v : eligible_sources(inst, q.commodity)) {
    dp[v].reachable = true;
    dp[v].dist = 0;
  }
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(g.nodes.size()); ++v) {
    for (auto e : g.in_edges[v]) {
      const auto& ed = g.edges[e];
      if (!dp[ed.tail].reachable) continue;
      rational cost;
      if (ed.kind == edge_kind::boarding) {
        if (q.boarding_allowed && !q.boarding_allowed(e)) continue;
        if (q.boarding_extra) cost = q.boarding_extra(e);
      } else {
        if (ed.kind == edge_kind::driving && q.driving_allowed && !q.driving_allowed(e))
          continue;
        cost = c.beta * rational(static_cast<long>(ed.tau));
        if (ed.kind == edge_kind::driving && q.driving_adjust) cost -= q.driving_adjust(e);
      }
      rational cand = dp[ed.tail].dist + cost;
      // eligible start beats an equal-cost waiting prefix; among in-edges the
      // canonical (kind, index) order wins ties
      if (!dp[v].reachable || cand < dp[v].dist) {
        dp[v] = {true, std::move(cand), e};
      }
    }
  }

  bool found = false;
  rational best_cost;
  std::int32_t best_node = -1;
  for (auto w : destination_platforms(inst, q.commodity)) {
    if (!dp[w].reachable) continue;
    rational total = dp[w].dist + arrival_cost(c, g.nodes[w].time);
    if (!found || total < best_cost) {
      found = true;
      best_cost = std::move(total);
      best_node = w;
    }
  }

  if (q.include_outside && (!found || c.outside_cost < best_cost)) {
    return strategy_result{outside_strategy(), c.outside_cost};
  }
  if (!found) return std::nullopt;

  strategy s;
  s.end_node = best_node;
  auto v = best_node;
  while (dp[v].parent_edge >= 0) {
    s.edges.push_back(dp[v].parent_edge);
    v = g.edges[dp[v].parent_edge].tail;
  }
  s.start_node = v;
  std::reverse(s.edges.begin(), s.edges.end());
  return strategy_result{std::move(s), std::move(best_cost)};
}

std::optional<rational> longest_strategy_cost(const instance& inst, int i) {
  const auto& g = inst.graph;
  const auto& c = inst.commodities[i];
  std::vector<dp_state> dp(g.nodes.size());
  for (auto v : eligible_sources(inst, i)) {
    dp[v].reachable = true;
    dp[v].dist = 0;
  }
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(g.nodes.size()); ++v) {
    for (auto e : g.in_edges[v]) {
      const auto& ed = g.edges[e];
      if (!dp[ed.tail].reachable) continue;
      rational cost = ed.kind == edge_kind::boarding
                          ? rational(0)
                          : c.beta * rational(static_cast<long>(ed.tau));
      rational cand = dp[ed.tail].dist + cost;
      if (!dp[v].reachable || cand > dp[v].dist) dp[v] = {true, std::move(cand), e};
    }
  }
  std::optional<rational> best;
  for (auto w : destination_platforms(inst, i)) {
    if (!dp[w].reachable) continue;
    rational total = dp[w].dist + arrival_cost(c, g.nodes[w].time);
    if (!best || total > *best) best = std::move(total);
  }
  return best;
}

}  // namespace teq
