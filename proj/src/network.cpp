#include "teq/network.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace teq {

std::int32_t time_expanded_graph::station_index(const std::string& id) const {
  auto it = std::lower_bound(station_ids.begin(), station_ids.end(), id);
  if (it == station_ids.end() || *it != id) return -1;
  return static_cast<std::int32_t>(it - station_ids.begin());
}

std::int32_t time_expanded_graph::trip_index(const std::string& id) const {
  auto it = std::lower_bound(trip_ids.begin(), trip_ids.end(), id);
  if (it == trip_ids.end() || *it != id) return -1;
  return static_cast<std::int32_t>(it - trip_ids.begin());
}

std::int32_t time_expanded_graph::platform_node(std::int32_t station, time_sec time) const {
  if (station < 0 || station >= static_cast<std::int32_t>(platform_nodes.size())) return -1;
  for (auto v : platform_nodes[station])
    if (nodes[v].time == time) return v;
  return -1;
}

namespace {

void validate_trip(const time_expanded_graph& g, const trip& z) {
  if (z.stops.size() < 2) throw trip_error(z.id, "needs at least 2 stops");
  if (z.capacity <= 0) throw trip_error(z.id, "capacity must be positive");
  for (std::size_t k = 0; k < z.stops.size(); ++k) {
    const auto& stop = z.stops[k];
    if (g.station_index(stop.station) < 0)
      throw trip_error(z.id, "unknown station '" + stop.station + "'");
    bool first = k == 0, last = k + 1 == z.stops.size();
    if (!first && !stop.arrival) throw trip_error(z.id, "missing arrival time");
    if (!last && !stop.departure) throw trip_error(z.id, "missing departure time");
    if (stop.arrival && stop.departure && *stop.departure < *stop.arrival)
      throw trip_error(z.id, "departure before arrival at '" + stop.station + "'");
    if (!first) {
      // arrival strictly later than the previous departure
      if (*stop.arrival <= *z.stops[k - 1].departure)
        throw trip_error(z.id, "arrival at '" + stop.station + "' not after previous departure");
    }
  }
}

}  // namespace

time_expanded_graph build_time_expanded(const std::vector<std::string>& stations,
                                        const std::vector<trip>& trips) {
  time_expanded_graph g;
  g.station_ids = stations;
  std::sort(g.station_ids.begin(), g.station_ids.end());
  g.station_ids.erase(std::unique(g.station_ids.begin(), g.station_ids.end()),
                      g.station_ids.end());
  {
    std::set<std::string> seen;
    for (const auto& z : trips)
      if (!seen.insert(z.id).second) throw trip_error(z.id, "duplicate trip id");
  }
  g.trip_ids.reserve(trips.size());
  for (const auto& z : trips) g.trip_ids.push_back(z.id);
  std::sort(g.trip_ids.begin(), g.trip_ids.end());
  for (const auto& z : trips) validate_trip(g, z);

  std::vector<const trip*> by_index(trips.size());
  for (const auto& z : trips) by_index[g.trip_index(z.id)] = &z;

  // one on-platform node per (station, time) with a vehicle event
  std::set<std::pair<std::int32_t, time_sec>> platform_events;
  for (const auto& z : trips)
    for (const auto& stop : z.stops) {
      auto s = g.station_index(stop.station);
      if (stop.arrival) platform_events.insert({s, *stop.arrival});
      if (stop.departure) platform_events.insert({s, *stop.departure});
    }

  struct proto_node {
    node_kind kind;
    time_sec time;
    std::int32_t station, trip;
  };
  std::vector<proto_node> proto;
  for (auto [s, t] : platform_events)
    proto.push_back({node_kind::on_platform, t, s, -1});
  for (std::size_t zi = 0; zi < by_index.size(); ++zi) {
    const trip& z = *by_index[zi];
    for (const auto& stop : z.stops) {
      auto s = g.station_index(stop.station);
      if (stop.arrival)
        proto.push_back({node_kind::arrival, *stop.arrival, s, static_cast<std::int32_t>(zi)});
      if (stop.departure)
        proto.push_back({node_kind::departure, *stop.departure, s, static_cast<std::int32_t>(zi)});
    }
  }
  std::sort(proto.begin(), proto.end(), [](const proto_node& a, const proto_node& b) {
    return std::tuple(a.time, static_cast<int>(a.kind), a.station, a.trip) <
           std::tuple(b.time, static_cast<int>(b.kind), b.station, b.trip);
  });
  g.nodes.reserve(proto.size());
  for (const auto& p : proto) g.nodes.push_back({p.kind, p.time, p.station, p.trip});

  auto find_node = [&](node_kind kind, time_sec time, std::int32_t station,
                       std::int32_t trip_idx) {
    proto_node key{kind, time, station, trip_idx};
    auto it = std::lower_bound(proto.begin(), proto.end(), key,
                               [](const proto_node& a, const proto_node& b) {
                                 return std::tuple(a.time, static_cast<int>(a.kind), a.station,
                                                   a.trip) <
                                        std::tuple(b.time, static_cast<int>(b.kind), b.station,
                                                   b.trip);
                               });
    assert(it != proto.end());
    return static_cast<std::int32_t>(it - proto.begin());
  };

  std::vector<ten_edge> edges;
  auto add_edge = [&](std::int32_t tail, std::int32_t head, edge_kind kind,
                      std::int32_t trip_idx, rational cap = rational(0)) {
    assert(tail < head);  // node order is topological
    ten_edge e;
    e.tail = tail;
    e.head = head;
    e.kind = kind;
    e.tau = g.nodes[head].time - g.nodes[tail].time;
    e.trip = trip_idx;
    e.capacity = std::move(cap);
    edges.push_back(std::move(e));
  };

  // waiting chains
  g.platform_nodes.assign(g.station_ids.size(), {});
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(g.nodes.size()); ++v)
    if (g.nodes[v].kind == node_kind::on_platform)
      g.platform_nodes[g.nodes[v].station].push_back(v);
  for (auto& chain : g.platform_nodes) {
    std::sort(chain.begin(), chain.end(),
              [&](std::int32_t a, std::int32_t b) { return g.nodes[a].time < g.nodes[b].time; });
    for (std::size_t k = 0; k + 1 < chain.size(); ++k)
      add_edge(chain[k], chain[k + 1], edge_kind::waiting, -1);
  }

  for (std::size_t zi = 0; zi < by_index.size(); ++zi) {
    const trip& z = *by_index[zi];
    auto ti = static_cast<std::int32_t>(zi);
    for (std::size_t k = 0; k < z.stops.size(); ++k) {
      const auto& stop = z.stops[k];
      auto s = g.station_index(stop.station);
      if (stop.departure) {
        auto dep = find_node(node_kind::departure, *stop.departure, s, ti);
        auto plat = find_node(node_kind::on_platform, *stop.departure, s, -1);
        add_edge(plat, dep, edge_kind::boarding, ti);
        const auto& next = z.stops[k + 1];
        auto arr = find_node(node_kind::arrival, *next.arrival, g.station_index(next.station), ti);
        add_edge(dep, arr, edge_kind::driving, ti, z.capacity);
      }
      if (stop.arrival) {
        auto arr = find_node(node_kind::arrival, *stop.arrival, s, ti);
        auto plat = find_node(node_kind::on_platform, *stop.arrival, s, -1);
        add_edge(arr, plat, edge_kind::alighting, ti);
        if (stop.departure) {
          auto dep = find_node(node_kind::departure, *stop.departure, s, ti);
          add_edge(arr, dep, edge_kind::dwelling, ti);
        }
      }
    }
  }

  std::sort(edges.begin(), edges.end(), [](const ten_edge& a, const ten_edge& b) {
    return std::tuple(a.tail, static_cast<int>(a.kind), a.head) <
           std::tuple(b.tail, static_cast<int>(b.kind), b.head);
  });
  g.edges = std::move(edges);

  g.out_edges.assign(g.nodes.size(), {});
  g.in_edges.assign(g.nodes.size(), {});
  g.boarding_successor.assign(g.edges.size(), -1);
  g.boarding_of_driving.assign(g.edges.size(), -1);
  g.previous_driving.assign(g.edges.size(), -1);
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(g.edges.size()); ++e) {
    g.out_edges[g.edges[e].tail].push_back(e);
    g.in_edges[g.edges[e].head].push_back(e);
    if (g.edges[e].kind == edge_kind::driving) g.driving_edges.push_back(e);
  }
  // e+ of a boarding edge: the driving edge leaving the same departure node
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(g.edges.size()); ++e) {
    if (g.edges[e].kind != edge_kind::boarding) continue;
    for (auto out : g.out_edges[g.edges[e].head])
      if (g.edges[out].kind == edge_kind::driving) {
        g.boarding_successor[e] = out;
        g.boarding_of_driving[out] = e;
      }
    assert(g.boarding_successor[e] >= 0);
  }
  // previous driving edge of the same vehicle (via the dwelling edge)
  for (auto d : g.driving_edges) {
    for (auto in : g.in_edges[g.edges[d].tail])
      if (g.edges[in].kind == edge_kind::dwelling) {
        for (auto in2 : g.in_edges[g.edges[in].tail])
          if (g.edges[in2].kind == edge_kind::driving) g.previous_driving[d] = in2;
      }
  }
  return g;
}

std::vector<trip> unroll_periodic(const std::vector<trip>& trip_templates, time_sec period,
                                  time_sec horizon_start, time_sec horizon_end) {
  if (period <= 0) throw std::invalid_argument("period must be positive");
  if (horizon_end <= horizon_start) throw std::invalid_argument("empty horizon");
  std::vector<trip> out;
  for (const auto& tpl : trip_templates) {
    if (tpl.stops.empty() || !tpl.stops.front().departure)
      throw trip_error(tpl.id, "template needs a first-stop departure");
    time_sec dep0 = *tpl.stops.front().departure;
    // smallest k with dep0 + k*period >= horizon_start
    time_sec k_lo = (horizon_start - dep0 + period - 1) / period;
    if (horizon_start - dep0 <= 0) k_lo = -((dep0 - horizon_start) / period);
    while (dep0 + k_lo * period < horizon_start) ++k_lo;
    while (k_lo > 0 && dep0 + (k_lo - 1) * period >= horizon_start) --k_lo;
    for (time_sec k = k_lo; dep0 + k * period < horizon_end; ++k) {
      trip copy = tpl;
      copy.id = tpl.id + "#" + std::to_string(k);
      for (auto& stop : copy.stops) {
        if (stop.arrival) *stop.arrival += k * period;
        if (stop.departure) *stop.departure += k * period;
      }
      out.push_back(std::move(copy));
    }
  }
  return out;
}

}  // namespace teq
