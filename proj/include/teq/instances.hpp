#ifndef TEQ_INSTANCES_HPP
#define TEQ_INSTANCES_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "teq/flow.hpp"

namespace teq {

// Instance files carry the network and demand in JSON with integer-second
// times and rationals as strings; groups with elastic demand are discretized
// into commodities when the instance is materialized.
struct file_defaults {
  rational beta = rational(0);
  rational gamma_late = rational(1);
  rational gamma_early = rational(0);
  rational outside_cost = rational(1000000);
  time_sec target_arrival = 0;
  std::optional<std::pair<time_sec, time_sec>> window;
};

struct raw_commodity {
  std::string id;
  std::string origin, destination;
  std::optional<std::pair<time_sec, time_sec>> window;
  std::optional<time_sec> target_arrival;
  std::optional<rational> beta, gamma_late, gamma_early;
  rational demand;
  std::optional<rational> outside_cost;
};

struct raw_group {
  std::string id;
  std::string origin, destination;
  std::optional<std::pair<time_sec, time_sec>> window;
  std::optional<time_sec> target_arrival;
  std::optional<rational> beta, gamma_late, gamma_early;
  std::vector<std::pair<rational, rational>> elastic;
};

struct od_demand {
  std::string origin, destination;
  rational volume;
};

struct instance_file {
  int version = 1;
  std::string notes;
  std::vector<std::string> stations;
  std::vector<trip> trips;
  std::optional<time_sec> period;  // trips are period-relative templates
  std::optional<std::pair<time_sec, time_sec>> horizon;
  file_defaults defaults;
  std::vector<raw_commodity> commodities;
  std::vector<raw_group> groups;
  std::vector<od_demand> od_demands;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

instance_file parse_instance_file(const std::string& json_text);
std::string serialize_instance_file(const instance_file& file);

// Unrolls periodic templates, builds the graph, resolves commodities and
// discretizes elastic groups.
instance materialize(const instance_file& file, std::size_t cost_cap = 10'000);

struct example_params {
  rational epsilon = rational(1, 64);  // fig9 green-vehicle capacity 1 - eps
  rational delta = rational(0);        // fig7 delay of the red arrival, hours
};

// Catalogue: fig1, fig4, fig6, fig7, fig9, fig10.
instance_file gen_example(const std::string& name, const example_params& params = {});

struct cnf_formula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;  // signed literals, up to 3 per clause
};

cnf_formula parse_dimacs(const std::string& text);
void validate(const cnf_formula& formula);

enum class sat_mode { dtc, fixed };

// 3-SAT reduction network: per variable a green/red vehicle pair, per clause
// a blue/pink gadget whose zig-zag path rides the literal vehicles. In dtc
// mode the clause commodities choose their departure time freely; in fixed
// mode they depart with the gadget's blue vehicle.
instance_file gen_sat(const cnf_formula& formula, sat_mode mode);

// Structural gadget check: no variable strategy mixes two vehicles.
bool sat_no_color_mixing(const instance& inst, int num_vars);

enum class profile_mode { dtc, fdt };

// One commodity per od pair and slot; slot demands follow the hourly shares
// (normalized over the horizon so the od volume is conserved exactly).
instance_file apply_demand_profile(const instance_file& file,
                                   const std::array<rational, 24>& shares,
                                   time_sec slot_seconds, profile_mode mode);

instance_file scale_demand(const instance_file& file, const rational& factor);

// trips.csv: trip_id,seq,station,arr_sec,dep_sec,capacity
// demand.csv: origin,destination,volume
// stations.csv (optional): station ids, one per line
instance_file import_csv(const std::string& trips_csv, const std::string& demand_csv,
                         const std::string& stations_csv = "");

std::array<rational, 24> parse_shares(const std::string& json_text);

// Flow files: exact rational volumes, paths as edge-id lists or "outside".
std::string serialize_flow(const flow& f);
flow parse_flow(const instance& inst, const std::string& json_text);

}  // namespace teq

#endif
