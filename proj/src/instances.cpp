#include "teq/instances.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace teq {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw parse_error(path + ": " + what);
}

rational get_rational(const json& j, const std::string& path) {
  if (j.is_number_integer()) return rational(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception& e) {
      fail(path, e.what());
    }
  }
  fail(path, "expected a rational (integer or string)");
}

time_sec get_time(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer time in seconds");
  auto t = j.get<std::int64_t>();
  if (t < 0) fail(path, "times must be non-negative");
  return t;
}

std::pair<time_sec, time_sec> get_window(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
  auto lo = get_time(j[0], path + "[0]");
  auto hi = get_time(j[1], path + "[1]");
  if (hi < lo) fail(path, "window upper bound below lower bound");
  return {lo, hi};
}

json rational_json(const rational& r) { return to_string(r); }

}  // namespace

instance_file parse_instance_file(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw parse_error(std::string("invalid json: ") + e.what());
  }
  if (!j.is_object()) fail("$", "expected an object");
  instance_file file;
  file.version = j.value("version", 1);
  file.notes = j.value("notes", std::string());

  if (!j.contains("stations") || !j["stations"].is_array()) fail("stations", "expected an array");
  for (std::size_t k = 0; k < j["stations"].size(); ++k) {
    const auto& s = j["stations"][k];
    if (!s.is_string()) fail("stations[" + std::to_string(k) + "]", "expected a string");
    file.stations.push_back(s.get<std::string>());
  }

  for (std::size_t k = 0; j.contains("trips") && k < j["trips"].size(); ++k) {
    std::string path = "trips[" + std::to_string(k) + "]";
    const auto& tj = j["trips"][k];
    trip z;
    if (!tj.contains("id")) fail(path, "missing id");
    z.id = tj["id"].get<std::string>();
    if (!tj.contains("capacity")) fail(path, "missing capacity");
    z.capacity = get_rational(tj["capacity"], path + ".capacity");
    if (!tj.contains("stops") || !tj["stops"].is_array()) fail(path, "missing stops");
    for (std::size_t s = 0; s < tj["stops"].size(); ++s) {
      std::string spath = path + ".stops[" + std::to_string(s) + "]";
      const auto& sj = tj["stops"][s];
      trip_stop stop;
      if (!sj.contains("station")) fail(spath, "missing station");
      stop.station = sj["station"].get<std::string>();
      if (sj.contains("arr")) stop.arrival = get_time(sj["arr"], spath + ".arr");
      if (sj.contains("dep")) stop.departure = get_time(sj["dep"], spath + ".dep");
      z.stops.push_back(std::move(stop));
    }
    file.trips.push_back(std::move(z));
  }

  if (j.contains("period")) {
    if (!j["period"].is_number_integer()) fail("period", "expected integer seconds");
    file.period = j["period"].get<std::int64_t>();
    if (*file.period <= 0) fail("period", "must be positive");
  }
  if (j.contains("horizon")) file.horizon = get_window(j["horizon"], "horizon");
  if (file.period && !file.horizon) fail("period", "periodic trips need a horizon");

  if (j.contains("defaults")) {
    const auto& dj = j["defaults"];
    if (dj.contains("beta")) file.defaults.beta = get_rational(dj["beta"], "defaults.beta");
    if (dj.contains("gamma_late"))
      file.defaults.gamma_late = get_rational(dj["gamma_late"], "defaults.gamma_late");
    if (dj.contains("gamma_early"))
      file.defaults.gamma_early = get_rational(dj["gamma_early"], "defaults.gamma_early");
    if (dj.contains("outside_cost"))
      file.defaults.outside_cost = get_rational(dj["outside_cost"], "defaults.outside_cost");
    if (dj.contains("target_arrival"))
      file.defaults.target_arrival = get_time(dj["target_arrival"], "defaults.target_arrival");
    if (dj.contains("window")) file.defaults.window = get_window(dj["window"], "defaults.window");
  }

  std::set<std::string> station_set(file.stations.begin(), file.stations.end());
  auto check_station = [&](const std::string& id, const std::string& path) {
    if (!station_set.count(id)) fail(path, "unknown station '" + id + "'");
  };

  for (std::size_t k = 0; j.contains("commodities") && k < j["commodities"].size(); ++k) {
    std::string path = "commodities[" + std::to_string(k) + "]";
    const auto& cj = j["commodities"][k];
    raw_commodity c;
    c.id = cj.value("id", "c" + std::to_string(k));
    if (!cj.contains("origin") || !cj.contains("destination"))
      fail(path, "missing origin/destination");
    c.origin = cj["origin"].get<std::string>();
    c.destination = cj["destination"].get<std::string>();
    check_station(c.origin, path + ".origin");
    check_station(c.destination, path + ".destination");
    if (cj.contains("window")) c.window = get_window(cj["window"], path + ".window");
    if (cj.contains("target_arrival"))
      c.target_arrival = get_time(cj["target_arrival"], path + ".target_arrival");
    if (cj.contains("beta")) c.beta = get_rational(cj["beta"], path + ".beta");
    if (cj.contains("gamma_late"))
      c.gamma_late = get_rational(cj["gamma_late"], path + ".gamma_late");
    if (cj.contains("gamma_early"))
      c.gamma_early = get_rational(cj["gamma_early"], path + ".gamma_early");
    if (!cj.contains("demand")) fail(path, "missing demand");
    c.demand = get_rational(cj["demand"], path + ".demand");
    if (c.demand < 0) fail(path + ".demand", "must be non-negative");
    if (cj.contains("outside_cost"))
      c.outside_cost = get_rational(cj["outside_cost"], path + ".outside_cost");
    file.commodities.push_back(std::move(c));
  }

  for (std::size_t k = 0; j.contains("groups") && k < j["groups"].size(); ++k) {
    std::string path = "groups[" + std::to_string(k) + "]";
    const auto& gj = j["groups"][k];
    raw_group grp;
    grp.id = gj.value("id", "g" + std::to_string(k));
    if (!gj.contains("origin") || !gj.contains("destination"))
      fail(path, "missing origin/destination");
    grp.origin = gj["origin"].get<std::string>();
    grp.destination = gj["destination"].get<std::string>();
    check_station(grp.origin, path + ".origin");
    check_station(grp.destination, path + ".destination");
    if (gj.contains("window")) grp.window = get_window(gj["window"], path + ".window");
    if (gj.contains("target_arrival"))
      grp.target_arrival = get_time(gj["target_arrival"], path + ".target_arrival");
    if (gj.contains("beta")) grp.beta = get_rational(gj["beta"], path + ".beta");
    if (gj.contains("gamma_late"))
      grp.gamma_late = get_rational(gj["gamma_late"], path + ".gamma_late");
    if (gj.contains("gamma_early"))
      grp.gamma_early = get_rational(gj["gamma_early"], path + ".gamma_early");
    if (!gj.contains("elastic") || !gj["elastic"].is_array() || gj["elastic"].empty())
      fail(path, "missing elastic breakpoints");
    for (std::size_t b = 0; b < gj["elastic"].size(); ++b) {
      std::string bpath = path + ".elastic[" + std::to_string(b) + "]";
      const auto& bj = gj["elastic"][b];
      if (!bj.is_array() || bj.size() != 2) fail(bpath, "expected [cost, volume]");
      grp.elastic.push_back({get_rational(bj[0], bpath + "[0]"), get_rational(bj[1], bpath + "[1]")});
    }
    for (std::size_t b = 0; b < grp.elastic.size(); ++b) {
      std::string bpath = path + ".elastic[" + std::to_string(b) + "]";
      if (grp.elastic[b].second < 0) fail(bpath, "volumes must be non-negative");
      if (b == 0 && grp.elastic[b].first != 0) fail(bpath, "first breakpoint must be at cost 0");
      if (b > 0 && !(grp.elastic[b - 1].first < grp.elastic[b].first))
        fail(bpath, "breakpoint costs must increase");
      if (b > 0 && grp.elastic[b].second > grp.elastic[b - 1].second)
        fail(bpath, "volumes must be non-increasing");
    }
    if (grp.elastic.back().second != 0) fail(path + ".elastic", "last volume must be 0");
    file.groups.push_back(std::move(grp));
  }

  for (std::size_t k = 0; j.contains("od_demands") && k < j["od_demands"].size(); ++k) {
    std::string path = "od_demands[" + std::to_string(k) + "]";
    const auto& oj = j["od_demands"][k];
    od_demand od;
    od.origin = oj["origin"].get<std::string>();
    od.destination = oj["destination"].get<std::string>();
    check_station(od.origin, path + ".origin");
    check_station(od.destination, path + ".destination");
    od.volume = get_rational(oj["volume"], path + ".volume");
    file.od_demands.push_back(std::move(od));
  }
  return file;
}

std::string serialize_instance_file(const instance_file& file) {
  json j;
  j["version"] = file.version;
  if (!file.notes.empty()) j["notes"] = file.notes;
  j["stations"] = file.stations;
  j["trips"] = json::array();
  for (const auto& z : file.trips) {
    json tj;
    tj["id"] = z.id;
    tj["capacity"] = rational_json(z.capacity);
    tj["stops"] = json::array();
    for (const auto& stop : z.stops) {
      json sj;
      sj["station"] = stop.station;
      if (stop.arrival) sj["arr"] = *stop.arrival;
      if (stop.departure) sj["dep"] = *stop.departure;
      tj["stops"].push_back(std::move(sj));
    }
    j["trips"].push_back(std::move(tj));
  }
  if (file.period) j["period"] = *file.period;
  if (file.horizon) j["horizon"] = {file.horizon->first, file.horizon->second};
  {
    json dj;
    dj["beta"] = rational_json(file.defaults.beta);
    dj["gamma_late"] = rational_json(file.defaults.gamma_late);
    dj["gamma_early"] = rational_json(file.defaults.gamma_early);
    dj["outside_cost"] = rational_json(file.defaults.outside_cost);
    dj["target_arrival"] = file.defaults.target_arrival;
    if (file.defaults.window)
      dj["window"] = {file.defaults.window->first, file.defaults.window->second};
    j["defaults"] = std::move(dj);
  }
  j["commodities"] = json::array();
  for (const auto& c : file.commodities) {
    json cj;
    cj["id"] = c.id;
    cj["origin"] = c.origin;
    cj["destination"] = c.destination;
    if (c.window) cj["window"] = {c.window->first, c.window->second};
    if (c.target_arrival) cj["target_arrival"] = *c.target_arrival;
    if (c.beta) cj["beta"] = rational_json(*c.beta);
    if (c.gamma_late) cj["gamma_late"] = rational_json(*c.gamma_late);
    if (c.gamma_early) cj["gamma_early"] = rational_json(*c.gamma_early);
    cj["demand"] = rational_json(c.demand);
    if (c.outside_cost) cj["outside_cost"] = rational_json(*c.outside_cost);
    j["commodities"].push_back(std::move(cj));
  }
  if (!file.groups.empty()) {
    j["groups"] = json::array();
    for (const auto& g : file.groups) {
      json gj;
      gj["id"] = g.id;
      gj["origin"] = g.origin;
      gj["destination"] = g.destination;
      if (g.window) gj["window"] = {g.window->first, g.window->second};
      if (g.target_arrival) gj["target_arrival"] = *g.target_arrival;
      if (g.beta) gj["beta"] = rational_json(*g.beta);
      if (g.gamma_late) gj["gamma_late"] = rational_json(*g.gamma_late);
      if (g.gamma_early) gj["gamma_early"] = rational_json(*g.gamma_early);
      gj["elastic"] = json::array();
      for (const auto& [cost, volume] : g.elastic)
        gj["elastic"].push_back({rational_json(cost), rational_json(volume)});
      j["groups"].push_back(std::move(gj));
    }
  }
  if (!file.od_demands.empty()) {
    j["od_demands"] = json::array();
    for (const auto& od : file.od_demands) {
      json oj;
      oj["origin"] = od.origin;
      oj["destination"] = od.destination;
      oj["volume"] = rational_json(od.volume);
      j["od_demands"].push_back(std::move(oj));
    }
  }
  return j.dump(2);
}

instance materialize(const instance_file& file, std::size_t cost_cap) {
  instance inst;
  std::vector<trip> trips = file.trips;
  if (file.period)
    trips = unroll_periodic(file.trips, *file.period, file.horizon->first, file.horizon->second);
  inst.graph = build_time_expanded(file.stations, trips);

  auto resolve = [&](const std::string& id) { return inst.graph.station_index(id); };
  auto full_window = [&]() -> std::pair<time_sec, time_sec> {
    if (file.defaults.window) return *file.defaults.window;
    if (file.horizon) return *file.horizon;
    time_sec lo = 0, hi = 0;
    for (const auto& n : inst.graph.nodes) hi = std::max(hi, n.time);
    return {lo, hi};
  };

  for (const auto& rc : file.commodities) {
    commodity c;
    c.id = rc.id;
    c.origin = resolve(rc.origin);
    c.destination = resolve(rc.destination);
    auto window = rc.window ? *rc.window : full_window();
    c.window_lo = window.first;
    c.window_hi = window.second;
    c.target_arrival = rc.target_arrival.value_or(file.defaults.target_arrival);
    c.beta = rc.beta.value_or(file.defaults.beta);
    c.gamma_late = rc.gamma_late.value_or(file.defaults.gamma_late);
    c.gamma_early = rc.gamma_early.value_or(file.defaults.gamma_early);
    c.demand = rc.demand;
    c.outside_cost = rc.outside_cost.value_or(file.defaults.outside_cost);
    if (c.beta < 0 || c.gamma_late < 0 || c.gamma_early < 0)
      throw parse_error("commodity '" + c.id + "': negative penalty factors");
    inst.commodities.push_back(std::move(c));
  }

  for (const auto& rg : file.groups) {
    elastic_group grp;
    grp.id = rg.id;
    grp.origin = resolve(rg.origin);
    grp.destination = resolve(rg.destination);
    auto window = rg.window ? *rg.window : full_window();
    grp.window_lo = window.first;
    grp.window_hi = window.second;
    grp.target_arrival = rg.target_arrival.value_or(file.defaults.target_arrival);
    grp.beta = rg.beta.value_or(file.defaults.beta);
    grp.gamma_late = rg.gamma_late.value_or(file.defaults.gamma_late);
    grp.gamma_early = rg.gamma_early.value_or(file.defaults.gamma_early);
    grp.elastic = rg.elastic;
    bool truncated = false;
    auto costs = enumerate_distinct_costs(grp, inst.graph, cost_cap, &truncated);
    if (truncated)
      throw parse_error("group '" + grp.id + "': distinct cost enumeration truncated");
    for (auto& c : discretize_elastic(grp, costs)) inst.commodities.push_back(std::move(c));
  }
  return inst;
}

}  // namespace teq
