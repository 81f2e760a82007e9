#include "teq/solver_single.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>

namespace teq {

namespace {

std::vector<char> reachable_nodes(const instance& inst, int i,
                                  const std::vector<char>& edge_alive) {
  const auto& g = inst.graph;
  std::vector<char> reach(g.num_nodes(), 0);
  for (auto v : eligible_sources(inst, i)) reach[v] = 1;
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(g.num_nodes()); ++v) {
    if (!reach[v]) continue;
    for (auto e : g.out_edges[v])
      if (edge_alive[e]) reach[g.edges[e].head] = 1;
  }
  return reach;
}

bool is_eligible_source(const instance& inst, int i, std::int32_t v) {
  const auto& c = inst.commodities[i];
  const auto& n = inst.graph.nodes[v];
  return n.kind == node_kind::on_platform && n.station == c.origin &&
         n.time >= c.window_lo && n.time <= c.window_hi;
}

}  // namespace

bool has_priority(const instance& inst, const strategy& p, const strategy& q) {
  if (p.outside || q.outside) return false;
  const auto& g = inst.graph;
  std::set<std::int32_t> q_edges(q.edges.begin(), q.edges.end());
  for (auto e : p.edges) {
    if (g.edges[e].kind != edge_kind::driving || !q_edges.count(e)) continue;
    auto boarding = g.boarding_of_driving[e];
    bool on_p = p.uses_edge(boarding);
    bool on_q = q_edges.count(boarding) > 0;
    if (on_p == on_q) continue;  // not a conflicting edge
    return on_q;                 // first conflicting edge decides
  }
  return false;
}

strategy minimal_path(const instance& inst, int i, const std::vector<char>& edge_alive,
                      std::int32_t end_node) {
  const auto& g = inst.graph;
  auto reach = reachable_nodes(inst, i, edge_alive);
  if (!reach[end_node]) throw std::invalid_argument("end node not reachable");

  strategy p;
  p.end_node = end_node;
  auto v = end_node;
  while (!is_eligible_source(inst, i, v)) {
    std::int32_t chosen = -1;
    for (auto e : g.in_edges[v]) {  // canonical order; non-boarding preferred
      if (!edge_alive[e] || !reach[g.edges[e].tail]) continue;
      if (g.edges[e].kind != edge_kind::boarding) {
        chosen = e;
        break;
      }
      if (chosen < 0) chosen = e;
    }
    if (chosen < 0) throw std::logic_error("backward walk left the reachable set");
    p.edges.push_back(chosen);
    v = g.edges[chosen].tail;
  }
  p.start_node = v;
  std::reverse(p.edges.begin(), p.edges.end());
  return p;
}

flow solve_single(const instance& inst, bool check_invariants) {
  if (inst.commodities.size() != 1)
    throw std::invalid_argument("solve_single needs exactly one commodity");
  if (!is_fdt(inst))
    throw std::invalid_argument("solve_single needs a fixed departure time");
  const auto& g = inst.graph;
  const auto& c = inst.commodities[0];

  flow f(&inst);
  std::vector<char> alive(g.num_edges(), 1);
  std::vector<rational> residual(g.num_edges(), rational(0));
  for (auto e : g.driving_edges) residual[e] = g.edges[e].capacity;

  auto start_time = c.window_lo;
  auto cost_at = [&](std::int32_t w) -> rational {
    return c.beta * rational(static_cast<long>(g.nodes[w].time - start_time)) +
           arrival_cost(c, g.nodes[w].time);
  };

  std::size_t rounds = 0;
  while (f.routed_volume(0) < c.demand) {
    if (++rounds > g.num_edges() + 1)
      throw std::logic_error("successive saturation exceeded its round bound");
    auto reach = reachable_nodes(inst, 0, alive);
    std::int32_t best_node = -1;
    rational best_cost;
    for (auto w : destination_platforms(inst, 0)) {
      if (!reach[w]) continue;
      auto cost = cost_at(w);
      if (best_node < 0 || cost < best_cost) {  // ties: earliest time, then index
        best_node = w;
        best_cost = std::move(cost);
      }
    }
    if (best_node < 0 || best_cost > c.outside_cost) {
      f.add(0, outside_strategy(), c.demand - f.routed_volume(0));
      break;
    }
    auto p = minimal_path(inst, 0, alive, best_node);
    rational delta = c.demand - f.routed_volume(0);
    for (auto e : p.driving_edges(g)) delta = std::min(delta, residual[e]);
    assert(delta > 0);
    f.add(0, p, delta);
    for (auto e : p.driving_edges(g)) {
      residual[e] -= delta;
      if (residual[e] == 0) alive[e] = 0;
    }
    if (check_invariants) {
      instance partial = inst;
      partial.commodities[0].demand = f.routed_volume(0);
      flow probe(&partial);
      for (const auto& [path, vol] : f.entries(0)) probe.add(0, path, vol);
      if (!verify_equilibrium(probe).ok())
        throw std::logic_error("intermediate flow is not an equilibrium");
    }
  }
  return f;
}

namespace {

constexpr const char* k_super_station = "__super_source";

// semantic edge key for remapping strategies across graphs
struct edge_key {
  int kind;
  std::string trip;
  int tail_kind;
  time_sec tail_time;
  std::string tail_station;
  int head_kind;
  time_sec head_time;
  std::string head_station;
  auto operator<=>(const edge_key&) const = default;
};

edge_key key_of(const time_expanded_graph& g, std::int32_t e) {
  const auto& ed = g.edges[e];
  const auto& t = g.nodes[ed.tail];
  const auto& h = g.nodes[ed.head];
  return {static_cast<int>(ed.kind),
          ed.trip >= 0 ? g.trip_ids[ed.trip] : std::string(),
          static_cast<int>(t.kind),
          t.time,
          g.station_ids[t.station],
          static_cast<int>(h.kind),
          h.time,
          g.station_ids[h.station]};
}

}  // namespace

super_source_reduction super_source_reduce(const instance& inst) {
  if (inst.commodities.empty()) throw std::invalid_argument("no commodities");
  const auto& first = inst.commodities.front();
  for (const auto& c : inst.commodities) {
    if (c.destination != first.destination)
      throw std::invalid_argument("commodities must share the destination");
    if (c.beta != 0 || c.window_lo != c.window_hi)
      throw std::invalid_argument("apply fdt_transform first (beta 0, singleton windows)");
    if (c.target_arrival != first.target_arrival || c.gamma_late != first.gamma_late ||
        c.gamma_early != first.gamma_early || c.outside_cost != first.outside_cost)
      throw std::invalid_argument("commodities must share the arrival cost function");
  }

  super_source_reduction red;
  std::vector<std::string> stations = inst.graph.station_ids;
  stations.push_back(k_super_station);

  std::vector<trip> trips;
  for (const auto& id : inst.graph.trip_ids) {
    // reconstruct the trip from its edges
    trip z;
    z.id = id;
    auto ti = inst.graph.trip_index(id);
    std::vector<std::int32_t> driving;
    for (auto e : inst.graph.driving_edges)
      if (inst.graph.edges[e].trip == ti) driving.push_back(e);
    std::sort(driving.begin(), driving.end(), [&](std::int32_t a, std::int32_t b) {
      return inst.graph.nodes[inst.graph.edges[a].tail].time <
             inst.graph.nodes[inst.graph.edges[b].tail].time;
    });
    z.capacity = inst.graph.edges[driving.front()].capacity;
    for (std::size_t k = 0; k < driving.size(); ++k) {
      const auto& ed = inst.graph.edges[driving[k]];
      trip_stop stop;
      stop.station = inst.graph.station_ids[inst.graph.nodes[ed.tail].station];
      stop.departure = inst.graph.nodes[ed.tail].time;
      if (k > 0) stop.arrival = inst.graph.nodes[inst.graph.edges[driving[k - 1]].head].time;
      z.stops.push_back(std::move(stop));
      if (k + 1 == driving.size()) {
        trip_stop last;
        last.station = inst.graph.station_ids[inst.graph.nodes[ed.head].station];
        last.arrival = inst.graph.nodes[ed.head].time;
        z.stops.push_back(std::move(last));
      }
    }
    trips.push_back(std::move(z));
  }

  rational total_demand(0);
  time_sec earliest = 0;
  bool have_earliest = false;
  for (std::size_t i = 0; i < inst.commodities.size(); ++i) {
    const auto& c = inst.commodities[i];
    red.artificial_trips.push_back("");
    if (c.demand == 0) continue;
    if (inst.graph.platform_node(c.origin, c.window_lo) < 0)
      throw std::invalid_argument("commodity '" + c.id +
                                  "' departs at a time with no platform node");
    trip z;
    z.id = "__src_" + std::to_string(i);
    red.artificial_trips.back() = z.id;
    z.capacity = c.demand;
    trip_stop at_source, at_origin;
    at_source.station = k_super_station;
    at_source.departure = c.window_lo - 1;
    at_origin.station = inst.graph.station_ids[c.origin];
    at_origin.arrival = c.window_lo;
    z.stops = {at_source, at_origin};
    trips.push_back(std::move(z));
    total_demand += c.demand;
    if (!have_earliest || c.window_lo - 1 < earliest) {
      earliest = c.window_lo - 1;
      have_earliest = true;
    }
  }

  red.reduced.graph = build_time_expanded(stations, trips);
  commodity merged;
  merged.id = "__merged";
  merged.origin = red.reduced.graph.station_index(k_super_station);
  merged.destination = red.reduced.graph.station_index(
      inst.graph.station_ids[first.destination]);
  merged.window_lo = merged.window_hi = earliest;
  merged.target_arrival = first.target_arrival;
  merged.beta = 0;
  merged.gamma_late = first.gamma_late;
  merged.gamma_early = first.gamma_early;
  merged.demand = total_demand;
  merged.outside_cost = first.outside_cost;
  red.reduced.commodities.push_back(std::move(merged));
  return red;
}

flow super_source_reduction::map_back(const instance& original, const flow& reduced_flow) const {
  const auto& rg = reduced.graph;
  const auto& og = original.graph;
  std::map<edge_key, std::int32_t> original_edges;
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(og.num_edges()); ++e)
    original_edges[key_of(og, e)] = e;
  std::map<std::string, int> trip_to_commodity;
  for (std::size_t i = 0; i < artificial_trips.size(); ++i)
    if (!artificial_trips[i].empty()) trip_to_commodity[artificial_trips[i]] = static_cast<int>(i);

  flow out(&original);
  for (const auto& [p, volume] : reduced_flow.entries(0)) {
    if (p.outside) continue;  // residual demand is assigned below
    // locate the artificial alighting edge; the suffix is the original path
    int commodity_idx = -1;
    std::size_t suffix_start = 0;
    for (std::size_t k = 0; k < p.edges.size(); ++k) {
      const auto& ed = rg.edges[p.edges[k]];
      if (ed.kind == edge_kind::alighting && ed.trip >= 0) {
        auto it = trip_to_commodity.find(rg.trip_ids[ed.trip]);
        if (it != trip_to_commodity.end()) {
          commodity_idx = it->second;
          suffix_start = k + 1;
          break;
        }
      }
    }
    if (commodity_idx < 0) throw std::logic_error("reduced path misses an artificial vehicle");
    strategy orig;
    for (std::size_t k = suffix_start; k < p.edges.size(); ++k) {
      auto it = original_edges.find(key_of(rg, p.edges[k]));
      if (it == original_edges.end())
        throw std::logic_error("reduced path uses an edge outside the original graph");
      orig.edges.push_back(it->second);
    }
    auto start_time = original.commodities[commodity_idx].window_lo;
    orig.start_node = og.platform_node(original.commodities[commodity_idx].origin, start_time);
    orig.end_node = orig.edges.empty() ? orig.start_node : og.edges[orig.edges.back()].head;
    out.add(commodity_idx, orig, volume);
  }
  for (int i = 0; i < static_cast<int>(original.commodities.size()); ++i) {
    rational residual = original.commodities[i].demand - out.routed_volume(i);
    assert(residual >= 0);
    if (residual > 0) out.add(i, outside_strategy(), residual);
  }
  return out;
}

}  // namespace teq
