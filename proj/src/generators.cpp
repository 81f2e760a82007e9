#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "teq/instances.hpp"

namespace teq {

using nlohmann::json;

namespace {

constexpr time_sec k_hour = 3600;

trip mk_trip(std::string id, rational cap,
             std::initializer_list<std::tuple<const char*, time_sec, time_sec>> stops) {
  // stop times in hours scaled outside; -1 marks absent arr/dep
  trip z;
  z.id = std::move(id);
  z.capacity = std::move(cap);
  for (auto [station, arr, dep] : stops) {
    trip_stop s;
    s.station = station;
    if (arr >= 0) s.arrival = arr;
    if (dep >= 0) s.departure = dep;
    z.stops.push_back(std::move(s));
  }
  return z;
}

raw_commodity mk_commodity(std::string id, std::string origin, std::string destination,
                           std::pair<time_sec, time_sec> window, rational demand,
                           rational outside) {
  raw_commodity c;
  c.id = std::move(id);
  c.origin = std::move(origin);
  c.destination = std::move(destination);
  c.window = window;
  c.demand = std::move(demand);
  c.outside_cost = std::move(outside);
  return c;
}

// figure instances measure costs in hours: beta = 1/3600 per second
const rational k_beta_hourly = rational(1, 3600);

instance_file fig1() {
  instance_file f;
  f.stations = {"a", "b", "c", "d"};
  f.trips.push_back(mk_trip("red", 1,
                            {{"a", -1, 1 * k_hour},
                             {"b", 3 * k_hour, 4 * k_hour},
                             {"c", 6 * k_hour, 7 * k_hour},
                             {"d", 8 * k_hour, -1}}));
  f.trips.push_back(mk_trip("blue", 1, {{"a", -1, 9000}, {"c", 16200, -1}}));
  f.defaults.beta = 0;
  f.defaults.gamma_late = 1;  // pure arrival-time minimization
  f.defaults.gamma_early = 0;
  auto c = mk_commodity("c0", "a", "c", {k_hour, k_hour}, 2, rational(1000000));
  c.target_arrival = 0;
  f.commodities.push_back(std::move(c));
  return f;
}

instance_file fig4() {
  instance_file f;
  f.stations = {"s", "v", "t"};
  f.trips.push_back(mk_trip("blue", 1,
                            {{"s", -1, 1 * k_hour},
                             {"v", 2 * k_hour, 2 * k_hour},
                             {"s", 3 * k_hour, 3 * k_hour},
                             {"t", 4 * k_hour, -1}}));
  f.trips.push_back(mk_trip("red", 1, {{"s", -1, 1 * k_hour}, {"t", 5 * k_hour, -1}}));
  f.defaults.beta = k_beta_hourly;
  f.defaults.gamma_late = 0;
  f.defaults.gamma_early = 0;
  f.horizon = {{0, 5 * k_hour}};
  // departure time choice over the whole horizon
  f.commodities.push_back(mk_commodity("c0", "s", "t", {0, 5 * k_hour}, 2, rational(100)));
  return f;
}

instance_file fig6() {
  instance_file f;
  f.stations = {"s", "v", "t"};
  f.trips.push_back(mk_trip("blue", 1,
                            {{"s", -1, 1 * k_hour}, {"v", 5400, 5400}, {"s", 2 * k_hour, -1}}));
  f.trips.push_back(mk_trip("green", 1, {{"s", -1, 9000}, {"t", 12600, -1}}));
  f.trips.push_back(mk_trip("red", 1, {{"v", -1, 2 * k_hour}, {"t", 16200, -1}}));
  f.trips.push_back(mk_trip("pink", 1, {{"s", -1, 16200}, {"t", 19800, -1}}));
  f.defaults.beta = k_beta_hourly;
  f.defaults.gamma_late = 0;
  f.defaults.gamma_early = 0;
  f.commodities.push_back(mk_commodity("c0", "s", "t", {k_hour, k_hour}, 2, rational(100)));
  return f;
}

instance_file fig7(const rational& delta) {
  rational shift = delta * 3600;
  if (delta < 0 || shift.get_den() != 1)
    throw parse_error("fig7 delta must be a non-negative whole number of seconds");
  time_sec red_arrival = 6 * k_hour + shift.get_num().get_si();
  instance_file f;
  f.stations = {"s", "v", "t"};
  f.trips.push_back(mk_trip("blue", 1,
                            {{"s", -1, 1 * k_hour},
                             {"v", 2 * k_hour, 2 * k_hour},
                             {"t", 6 * k_hour, -1}}));
  f.trips.push_back(mk_trip("pink", 1,
                            {{"v", -1, 2 * k_hour},
                             {"s", 3 * k_hour, 3 * k_hour},
                             {"t", 5 * k_hour, -1}}));
  f.trips.push_back(mk_trip("red", 1, {{"s", -1, 5 * k_hour}, {"t", red_arrival, -1}}));
  f.defaults.beta = k_beta_hourly;
  f.defaults.gamma_late = 0;
  f.defaults.gamma_early = 0;
  f.commodities.push_back(mk_commodity("c0", "s", "t", {k_hour, k_hour}, 2, rational(1000)));
  return f;
}

instance_file fig9(const rational& epsilon) {
  if (!(epsilon > 0) || !(epsilon < 1))
    throw parse_error("fig9 epsilon must lie strictly between 0 and 1");
  instance_file f;
  f.stations = {"t13", "s1", "s2", "v", "s3", "s4", "t24"};
  f.trips.push_back(mk_trip("blue", 1,
                            {{"s1", -1, 1 * k_hour},
                             {"s2", 2 * k_hour, 3 * k_hour},
                             {"v", 4 * k_hour, 5 * k_hour},
                             {"t24", 6 * k_hour, -1}}));
  f.trips.push_back(mk_trip("green", 1 - epsilon,
                            {{"s4", -1, 1 * k_hour},
                             {"s3", 2 * k_hour, 3 * k_hour},
                             {"v", 4 * k_hour, -1}}));
  f.trips.push_back(mk_trip("red", 1, {{"v", -1, 5 * k_hour}, {"t13", 6 * k_hour, -1}}));
  f.defaults.beta = k_beta_hourly;
  f.defaults.gamma_late = 0;
  f.defaults.gamma_early = 0;
  f.commodities.push_back(mk_commodity("c1", "s1", "t13", {k_hour, k_hour}, 1, rational(100)));
  f.commodities.push_back(
      mk_commodity("c2", "s2", "t24", {3 * k_hour, 3 * k_hour}, 1, rational(100)));
  f.commodities.push_back(
      mk_commodity("c3", "s3", "t13", {3 * k_hour, 3 * k_hour}, 1, rational(100)));
  f.commodities.push_back(mk_commodity("c4", "s4", "t24", {k_hour, k_hour}, 1, rational(100)));
  return f;
}

instance_file fig10() {
  instance_file f;
  f.stations = {"s1", "s2", "s3", "u", "v", "t1", "w", "t23"};
  f.trips.push_back(mk_trip("green", 1,
                            {{"s1", -1, 1 * k_hour},
                             {"s2", 2 * k_hour, 2 * k_hour},
                             {"u", 4 * k_hour, 4 * k_hour},
                             {"v", 5 * k_hour, -1}}));
  f.trips.push_back(mk_trip("blue", 1,
                            {{"s3", -1, 5 * k_hour},
                             {"v", 7 * k_hour, 7 * k_hour},
                             {"t1", 8 * k_hour, 8 * k_hour},
                             {"w", 9 * k_hour, -1}}));
  f.trips.push_back(mk_trip("red", 1,
                            {{"u", -1, 8 * k_hour},
                             {"w", 11 * k_hour, 11 * k_hour},
                             {"t23", 12 * k_hour, -1}}));
  f.defaults.beta = k_beta_hourly;
  f.defaults.gamma_late = 0;
  f.defaults.gamma_early = 0;
  f.commodities.push_back(mk_commodity("c1", "s1", "t1", {k_hour, k_hour}, 1, rational(100)));
  f.commodities.push_back(
      mk_commodity("c2", "s2", "t23", {2 * k_hour, 2 * k_hour}, 1, rational(100)));
  f.commodities.push_back(
      mk_commodity("c3", "s3", "t23", {5 * k_hour, 5 * k_hour}, 1, rational(100)));
  return f;
}

}  // namespace

instance_file gen_example(const std::string& name, const example_params& params) {
  if (name == "fig1") return fig1();
  if (name == "fig4") return fig4();
  if (name == "fig6") return fig6();
  if (name == "fig7") return fig7(params.delta);
  if (name == "fig9") return fig9(params.epsilon);
  if (name == "fig10") return fig10();
  throw parse_error("unknown example '" + name + "'");
}

void validate(const cnf_formula& formula) {
  if (formula.num_vars < 0) throw parse_error("negative variable count");
  for (std::size_t j = 0; j < formula.clauses.size(); ++j) {
    const auto& clause = formula.clauses[j];
    std::string path = "clause " + std::to_string(j + 1);
    if (clause.size() > 3) throw parse_error(path + ": more than 3 literals");
    std::set<int> seen;
    for (int lit : clause) {
      if (lit == 0 || std::abs(lit) > formula.num_vars)
        throw parse_error(path + ": literal out of range");
      if (seen.count(-lit))
        throw parse_error(path + ": contains a variable and its negation");
      seen.insert(lit);
    }
  }
}

cnf_formula parse_dimacs(const std::string& text) {
  cnf_formula f;
  std::istringstream in(text);
  std::string tok;
  bool have_header = false;
  std::vector<int> current;
  while (in >> tok) {
    if (tok == "c") {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (tok == "p") {
      std::string kind;
      int n = 0, m = 0;
      if (!(in >> kind >> n >> m) || kind != "cnf") throw parse_error("bad dimacs header");
      f.num_vars = n;
      have_header = true;
      continue;
    }
    int lit = std::stoi(tok);
    if (!have_header) throw parse_error("dimacs clauses before the header");
    if (lit == 0) {
      f.clauses.push_back(current);
      current.clear();
    } else {
      current.push_back(lit);
    }
  }
  if (!current.empty()) f.clauses.push_back(current);
  validate(f);
  return f;
}

instance_file gen_sat(const cnf_formula& formula, sat_mode mode) {
  validate(formula);
  const int n = formula.num_vars;
  const int m = static_cast<int>(formula.clauses.size());
  const time_sec stage = n + 6;
  auto gadget_start = [&](int j) { return 2 + static_cast<time_sec>(j) * stage; };  // 0-based
  const time_sec t_end = 2 + static_cast<time_sec>(m) * stage;
  const rational outside = rational(100) * rational(static_cast<long>(t_end + 10));

  instance_file f;
  f.notes = "3-sat reduction network";
  for (int i = 1; i <= n; ++i) {
    f.stations.push_back("s_x" + std::to_string(i));
    f.stations.push_back("t_x" + std::to_string(i));
  }
  for (int j = 1; j <= m; ++j) {
    f.stations.push_back("sC" + std::to_string(j));
    for (int k = 0; k <= n; ++k)
      f.stations.push_back("v" + std::to_string(k) + "C" + std::to_string(j));
    f.stations.push_back("tC" + std::to_string(j));
  }

  // variable vehicles: both colours depart and arrive together; the colour
  // detours through each gadget whose clause carries the matching literal
  for (int i = 1; i <= n; ++i) {
    for (int sign = 0; sign < 2; ++sign) {  // 0: green (positive), 1: red (negative)
      trip z;
      z.id = (sign == 0 ? "green_x" : "red_x") + std::to_string(i);
      z.capacity = 1;
      trip_stop first;
      first.station = "s_x" + std::to_string(i);
      first.departure = 0;
      z.stops.push_back(std::move(first));
      for (int j = 0; j < m; ++j) {
        int want = sign == 0 ? i : -i;
        bool in_clause = std::find(formula.clauses[j].begin(), formula.clauses[j].end(),
                                   want) != formula.clauses[j].end();
        if (!in_clause) continue;
        time_sec g = gadget_start(j);
        trip_stop hi, lo;
        hi.station = "v" + std::to_string(i) + "C" + std::to_string(j + 1);
        hi.arrival = g + (n - i) + 1;
        hi.departure = g + (n - i) + 1;
        lo.station = "v" + std::to_string(i - 1) + "C" + std::to_string(j + 1);
        lo.arrival = g + (n - i) + 2;
        lo.departure = g + (n - i) + 2;
        z.stops.push_back(std::move(hi));
        z.stops.push_back(std::move(lo));
      }
      trip_stop last;
      last.station = "t_x" + std::to_string(i);
      last.arrival = t_end;
      z.stops.push_back(std::move(last));
      f.trips.push_back(std::move(z));
    }
  }

  for (int j = 0; j < m; ++j) {
    time_sec g = gadget_start(j);
    std::string cj = std::to_string(j + 1);
    f.trips.push_back(mk_trip("blue_C" + cj, 1,
                              {{("sC" + cj).c_str(), -1, g},
                               {("v" + std::to_string(n) + "C" + cj).c_str(), g + 1, g + 1},
                               {("tC" + cj).c_str(), g + n + 4, -1}}));
    f.trips.push_back(mk_trip("pink_C" + cj, 1,
                              {{("v0C" + cj).c_str(), -1, g + n + 1},
                               {("sC" + cj).c_str(), g + n + 2, g + n + 2},
                               {("tC" + cj).c_str(), g + n + 3, -1}}));
    // fresh unit-capacity vehicles cover the steps without a literal
    for (int k = n; k >= 1; --k) {
      bool literal = std::find(formula.clauses[j].begin(), formula.clauses[j].end(), k) !=
                         formula.clauses[j].end() ||
                     std::find(formula.clauses[j].begin(), formula.clauses[j].end(), -k) !=
                         formula.clauses[j].end();
      if (literal) continue;
      f.trips.push_back(
          mk_trip("fresh_C" + cj + "_" + std::to_string(k), 1,
                  {{("v" + std::to_string(k) + "C" + cj).c_str(), -1, g + (n - k) + 1},
                   {("v" + std::to_string(k - 1) + "C" + cj).c_str(), g + (n - k) + 2, -1}}));
    }
  }

  f.defaults.beta = 1;  // cost = travel time in seconds
  f.defaults.gamma_late = 0;
  f.defaults.gamma_early = 0;
  f.horizon = {{0, t_end}};
  for (int i = 1; i <= n; ++i)
    f.commodities.push_back(mk_commodity("x" + std::to_string(i), "s_x" + std::to_string(i),
                                         "t_x" + std::to_string(i), {0, 0}, 1, outside));
  for (int j = 1; j <= m; ++j) {
    auto window = mode == sat_mode::dtc ? std::pair<time_sec, time_sec>{0, t_end}
                                        : std::pair<time_sec, time_sec>{gadget_start(j - 1),
                                                                        gadget_start(j - 1)};
    f.commodities.push_back(
        mk_commodity("C" + std::to_string(j), "sC" + std::to_string(j),
                     "tC" + std::to_string(j), window, 2, outside));
  }
  return f;
}

bool sat_no_color_mixing(const instance& inst, int num_vars) {
  for (int i = 0; i < num_vars; ++i) {
    for (const auto& p : enumerate_strategies(inst, i, 100000)) {
      if (p.outside) continue;
      std::set<std::int32_t> trips;
      for (auto e : p.driving_edges(inst.graph)) trips.insert(inst.graph.edges[e].trip);
      if (trips.size() > 1) return false;
    }
  }
  return true;
}

instance_file apply_demand_profile(const instance_file& file,
                                   const std::array<rational, 24>& shares,
                                   time_sec slot_seconds, profile_mode mode) {
  if (!file.horizon) throw parse_error("demand profile needs a horizon");
  if (slot_seconds <= 0) throw parse_error("slot length must be positive");
  rational sum(0);
  for (const auto& s : shares) {
    if (s < 0) throw parse_error("shares must be non-negative");
    sum += s;
  }
  if (sum != 1) throw parse_error("shares must sum to 1");

  auto [h_lo, h_hi] = *file.horizon;
  struct slot {
    time_sec start;
    rational weight;
  };
  std::vector<slot> slots;
  rational total_weight(0);
  for (time_sec t = h_lo; t < h_hi; t += slot_seconds) {
    int hour = static_cast<int>((t / k_hour) % 24);
    rational w = shares[hour] * rational(static_cast<long>(slot_seconds), 3600);
    slots.push_back({t, w});
    total_weight += w;
  }
  if (total_weight == 0) throw parse_error("no demand share falls into the horizon");

  instance_file out = file;
  out.commodities.clear();
  out.od_demands.clear();
  for (const auto& od : file.od_demands) {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (slots[k].weight == 0) continue;
      raw_commodity c;
      c.id = od.origin + "-" + od.destination + "@" + std::to_string(slots[k].start);
      c.origin = od.origin;
      c.destination = od.destination;
      c.window = mode == profile_mode::dtc
                     ? std::pair<time_sec, time_sec>{h_lo, h_hi}
                     : std::pair<time_sec, time_sec>{slots[k].start, slots[k].start};
      c.target_arrival = slots[k].start;
      c.demand = od.volume * slots[k].weight / total_weight;
      out.commodities.push_back(std::move(c));
    }
  }
  return out;
}

instance_file scale_demand(const instance_file& file, const rational& factor) {
  if (!(factor > 0)) throw parse_error("demand factor must be positive");
  instance_file out = file;
  for (auto& c : out.commodities) c.demand *= factor;
  for (auto& od : out.od_demands) od.volume *= factor;
  for (auto& g : out.groups)
    for (auto& [cost, volume] : g.elastic) volume *= factor;
  return out;
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (line.back() == ',') row.push_back("");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

instance_file import_csv(const std::string& trips_csv, const std::string& demand_csv,
                         const std::string& stations_csv) {
  instance_file f;
  std::set<std::string> stations;
  if (!stations_csv.empty())
    for (const auto& row : parse_csv(stations_csv)) {
      if (row[0] == "station" || row[0] == "id") continue;
      stations.insert(row[0]);
    }

  struct stop_row {
    int seq;
    trip_stop stop;
    rational capacity;
  };
  std::map<std::string, std::vector<stop_row>> by_trip;
  auto rows = parse_csv(trips_csv);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    if (k == 0 && row[0] == "trip_id") continue;
    if (row.size() != 6)
      throw parse_error("trips.csv row " + std::to_string(k + 1) +
                        ": expected trip_id,seq,station,arr_sec,dep_sec,capacity");
    stop_row sr;
    sr.seq = std::stoi(row[1]);
    sr.stop.station = row[2];
    if (!row[3].empty()) sr.stop.arrival = std::stoll(row[3]);
    if (!row[4].empty()) sr.stop.departure = std::stoll(row[4]);
    sr.capacity = parse_rational(row[5]);
    stations.insert(row[2]);
    by_trip[row[0]].push_back(std::move(sr));
  }
  for (auto& [id, stops] : by_trip) {
    std::sort(stops.begin(), stops.end(),
              [](const stop_row& a, const stop_row& b) { return a.seq < b.seq; });
    trip z;
    z.id = id;
    z.capacity = stops.front().capacity;
    for (auto& s : stops) z.stops.push_back(std::move(s.stop));
    f.trips.push_back(std::move(z));
  }

  auto drows = parse_csv(demand_csv);
  for (std::size_t k = 0; k < drows.size(); ++k) {
    const auto& row = drows[k];
    if (k == 0 && row[0] == "origin") continue;
    if (row.size() != 3)
      throw parse_error("demand.csv row " + std::to_string(k + 1) +
                        ": expected origin,destination,volume");
    od_demand od;
    od.origin = row[0];
    od.destination = row[1];
    od.volume = parse_rational(row[2]);
    stations.insert(row[0]);
    stations.insert(row[1]);
    f.od_demands.push_back(std::move(od));
  }
  f.stations.assign(stations.begin(), stations.end());
  return f;
}

std::array<rational, 24> parse_shares(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid json: ") + e.what());
  }
  const auto& arr = j.is_object() ? j.at("shares") : j;
  if (!arr.is_array() || arr.size() != 24) throw parse_error("shares: expected 24 entries");
  std::array<rational, 24> shares;
  for (int h = 0; h < 24; ++h) {
    const auto& v = arr[h];
    shares[h] = v.is_string() ? parse_rational(v.get<std::string>())
                              : rational(static_cast<long>(v.get<std::int64_t>()));
  }
  return shares;
}

std::string serialize_flow(const flow& f) {
  json j;
  j["entries"] = json::array();
  for (const auto& e : f.sorted_entries()) {
    json ej;
    ej["commodity"] = f.inst().commodities[e.commodity].id;
    if (e.path.outside) {
      ej["path"] = "outside";
    } else {
      ej["path"] = e.path.edges;
      ej["start_node"] = e.path.start_node;
    }
    ej["volume"] = to_string(e.volume);
    j["entries"].push_back(std::move(ej));
  }
  return j.dump(2);
}

flow parse_flow(const instance& inst, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid json: ") + e.what());
  }
  std::map<std::string, int> by_id;
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i)
    by_id[inst.commodities[i].id] = i;
  flow f(&inst);
  for (std::size_t k = 0; j.contains("entries") && k < j["entries"].size(); ++k) {
    std::string path = "entries[" + std::to_string(k) + "]";
    const auto& ej = j["entries"][k];
    auto it = by_id.find(ej.at("commodity").get<std::string>());
    if (it == by_id.end()) throw parse_error(path + ": unknown commodity");
    strategy p;
    if (ej.at("path").is_string() && ej["path"] == "outside") {
      p = outside_strategy();
    } else {
      for (const auto& e : ej.at("path")) {
        auto idx = e.get<std::int64_t>();
        if (idx < 0 || idx >= static_cast<std::int64_t>(inst.graph.num_edges()))
          throw parse_error(path + ": edge id out of range");
        p.edges.push_back(static_cast<std::int32_t>(idx));
      }
      if (ej.contains("start_node")) p.start_node = ej["start_node"].get<std::int32_t>();
      else if (!p.edges.empty()) p.start_node = inst.graph.edges[p.edges.front()].tail;
      p.end_node = p.edges.empty() ? p.start_node : inst.graph.edges[p.edges.back()].head;
      if (!is_valid_strategy(inst, it->second, p))
        throw parse_error(path + ": not a valid strategy of the commodity");
    }
    f.add(it->second, p, parse_rational(ej.at("volume").get<std::string>()));
  }
  return f;
}

}  // namespace teq
