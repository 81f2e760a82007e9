#ifndef TEQ_NETWORK_HPP
#define TEQ_NETWORK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teq/rational.hpp"

namespace teq {

using time_sec = std::int64_t;

struct trip_stop {
  std::string station;
  std::optional<time_sec> arrival;    // absent at the first stop
  std::optional<time_sec> departure;  // absent at the last stop
};

struct trip {
  std::string id;
  rational capacity;  // hard capacity of the vehicle, > 0
  std::vector<trip_stop> stops;
};

// Node kinds are ranked so that the canonical node order is topological:
// at equal times, alighting runs arrival -> platform, boarding runs
// platform -> departure and dwelling runs arrival -> departure.
enum class node_kind : std::uint8_t { arrival = 0, on_platform = 1, departure = 2 };

// Edge kinds are ranked so that equal-cost shortest-path tie-breaking
// prefers staying on a vehicle over alight-and-reboard variants.
enum class edge_kind : std::uint8_t {
  dwelling = 0,
  waiting = 1,
  driving = 2,
  alighting = 3,
  boarding = 4,
};

struct ten_node {
  node_kind kind;
  time_sec time;
  std::int32_t station;  // index into station_ids
  std::int32_t trip;     // index into trip_ids, -1 for on-platform nodes
};

struct ten_edge {
  std::int32_t tail;
  std::int32_t head;
  edge_kind kind;
  time_sec tau;         // theta(head) - theta(tail)
  std::int32_t trip;    // -1 for waiting edges
  rational capacity;    // set on driving edges only
};

class time_expanded_graph {
 public:
  std::vector<std::string> station_ids;  // sorted
  std::vector<std::string> trip_ids;     // sorted
  std::vector<ten_node> nodes;           // canonical, topological order
  std::vector<ten_edge> edges;           // canonical order

  std::vector<std::vector<std::int32_t>> out_edges;
  std::vector<std::vector<std::int32_t>> in_edges;
  std::vector<std::vector<std::int32_t>> platform_nodes;  // per station, by time
  std::vector<std::int32_t> driving_edges;

  // e -> e+ for boarding edges, -1 otherwise.
  std::vector<std::int32_t> boarding_successor;
  // driving edge -> the unique boarding edge into its departure node.
  std::vector<std::int32_t> boarding_of_driving;
  // driving edge -> previous driving edge of the same trip, -1 at the first leg.
  std::vector<std::int32_t> previous_driving;

  std::int32_t station_index(const std::string& id) const;
  std::int32_t trip_index(const std::string& id) const;
  time_sec node_time(std::int32_t v) const { return nodes[v].time; }
  bool is_driving(std::int32_t e) const { return edges[e].kind == edge_kind::driving; }
  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_edges() const { return edges.size(); }

  // Platform node of (station, time), -1 if no event happens there.
  std::int32_t platform_node(std::int32_t station, time_sec time) const;
};

struct trip_error : std::runtime_error {
  std::string trip_id;
  trip_error(std::string id, const std::string& what)
      : std::runtime_error("trip '" + id + "': " + what), trip_id(std::move(id)) {}
};

time_expanded_graph build_time_expanded(const std::vector<std::string>& stations,
                                        const std::vector<trip>& trips);

// One concrete trip per template and period shift k with the shifted
// first departure inside [horizon_start, horizon_end); ids suffixed "#k".
std::vector<trip> unroll_periodic(const std::vector<trip>& trip_templates,
                                  time_sec period,
                                  time_sec horizon_start,
                                  time_sec horizon_end);

}  // namespace teq

#endif
