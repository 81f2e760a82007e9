#include "teq/flow.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace teq {

flow::flow(const instance* inst)
    : inst_(inst),
      entries_(inst->commodities.size()),
      loads_(inst->graph.num_edges(), rational(0)) {}

rational flow::volume(int i, const strategy& p) const {
  auto it = entries_[i].find(p);
  return it == entries_[i].end() ? rational(0) : it->second;
}

rational flow::routed_volume(int i) const {
  rational total(0);
  for (const auto& [p, v] : entries_[i]) total += v;
  return total;
}

void flow::add(int i, const strategy& p, const rational& delta) {
  if (delta == 0) return;
  auto [it, inserted] = entries_[i].try_emplace(p, rational(0));
  it->second += delta;
  if (it->second < 0) throw std::invalid_argument("flow entry would become negative");
  for (auto e : p.edges) loads_[e] += delta;
  if (it->second == 0) entries_[i].erase(it);
}

void flow::set(int i, const strategy& p, const rational& value) {
  add(i, p, value - volume(i, p));
}

bool flow::demand_feasible() const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (routed_volume(static_cast<int>(i)) != inst_->commodities[i].demand) return false;
  return true;
}

bool flow::capacity_feasible() const {
  for (auto e : inst_->graph.driving_edges)
    if (loads_[e] > inst_->graph.edges[e].capacity) return false;
  return true;
}

std::vector<flow::entry> flow::sorted_entries() const {
  std::vector<entry> out;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (const auto& [p, v] : entries_[i]) out.push_back({static_cast<int>(i), p, v});
  return out;  // maps iterate in strategy order; commodities ascending
}

std::vector<rational> flow::recomputed_loads() const {
  std::vector<rational> loads(inst_->graph.num_edges(), rational(0));
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (const auto& [p, v] : entries_[i])
      for (auto e : p.edges) loads[e] += v;
  return loads;
}

flow deviate(const flow& f, int i, const strategy& p, const strategy& q, const rational& eps) {
  if (eps <= 0) throw std::invalid_argument("deviation requires eps > 0");
  if (f.volume(i, p) < eps) throw std::invalid_argument("deviation exceeds flow on p");
  flow out = f;
  out.add(i, p, -eps);
  out.add(i, q, eps);
  return out;
}

bool is_admissible(const flow& f, int i, const strategy& p, const strategy& q,
                   const rational& eps) {
  if (eps <= 0 || f.volume(i, p) < eps) return false;
  const auto& g = f.inst().graph;
  for (auto e : q.boarding_edges(g)) {
    auto succ = g.boarding_successor[e];
    rational load = f.edge_load(succ) + eps;
    if (p.uses_edge(succ)) load -= eps;
    if (load > g.edges[succ].capacity) return false;
  }
  return true;
}

bool is_available_alternative(const flow& f, int i, const strategy& p, const strategy& q) {
  (void)i;
  const auto& g = f.inst().graph;
  for (auto e : q.boarding_edges(g)) {
    auto succ = g.boarding_successor[e];
    if (p.uses_edge(succ)) {
      if (f.edge_load(succ) > g.edges[succ].capacity) return false;
    } else {
      if (f.edge_load(succ) >= g.edges[succ].capacity) return false;
    }
  }
  return true;
}

strategy_result best_available_alternative(const flow& f, int i, const strategy& p) {
  const auto& g = f.inst().graph;
  strategy_query q;
  q.inst = &f.inst();
  q.commodity = i;
  q.boarding_allowed = [&](std::int32_t e) {
    auto succ = g.boarding_successor[e];
    if (p.uses_edge(succ)) return f.edge_load(succ) <= g.edges[succ].capacity;
    return f.edge_load(succ) < g.edges[succ].capacity;
  };
  auto best = shortest_strategy(q);
  assert(best);  // the outside option is always available
  return *best;
}

verify_result verify_equilibrium(const flow& f, std::size_t path_cap) {
  verify_result res;
  if (!f.feasible()) {
    res.outcome = verify_result::status::infeasible;
    return res;
  }
  const auto& inst = f.inst();
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    if (f.entries(i).empty()) continue;
    auto strategies = enumerate_strategies(inst, i, path_cap);
    std::vector<rational> costs;
    costs.reserve(strategies.size());
    for (const auto& q : strategies) costs.push_back(path_cost(inst, i, q));
    for (const auto& [p, volume] : f.entries(i)) {
      rational cost_p = path_cost(inst, i, p);
      const strategy* witness = nullptr;
      const rational* witness_cost = nullptr;
      for (std::size_t k = 0; k < strategies.size(); ++k) {
        if (!(costs[k] < cost_p)) continue;
        if (witness_cost && !(costs[k] < *witness_cost)) continue;
        if (is_available_alternative(f, i, p, strategies[k])) {
          witness = &strategies[k];
          witness_cost = &costs[k];
        }
      }
      if (witness) {
        ++res.violation_count;
        if (!res.first)
          res.first = equilibrium_violation{i, p, *witness, cost_p, *witness_cost};
      }
    }
  }
  if (res.violation_count > 0) res.outcome = verify_result::status::violation;
  return res;
}

bool verify_qvi(const flow& f) {
  if (!f.feasible()) return false;
  const auto& inst = f.inst();
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i)
    for (const auto& [p, volume] : f.entries(i)) {
      auto best = best_available_alternative(f, i, p);
      if (best.cost < path_cost(inst, i, p)) return false;
    }
  return true;
}

bool verify_bs(const flow& f) {
  if (!f.demand_feasible()) return false;
  const auto& inst = f.inst();
  const auto& g = inst.graph;
  auto ext = extend_graph(inst);
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    for (const auto& [p, volume] : f.entries(i)) {
      rational lhs = path_cost(inst, i, p);
      for (auto e : p.boarding_edges(g)) {
        auto succ = g.boarding_successor[e];
        if (f.edge_load(succ) > g.edges[succ].capacity) lhs += ext.penalty_m;
      }
      // liminf_{eps down 0} of the deviated cost: a boarding edge of q jumps
      // to M unless removing eps of p keeps its vehicle within capacity
      strategy_query q;
      q.inst = &inst;
      q.commodity = i;
      q.boarding_extra = [&](std::int32_t e) -> rational {
        auto succ = g.boarding_successor[e];
        if (p.uses_edge(succ)) {
          if (f.edge_load(succ) > g.edges[succ].capacity) return ext.penalty_m;
        } else {
          if (f.edge_load(succ) >= g.edges[succ].capacity) return ext.penalty_m;
        }
        return rational(0);
      };
      auto best = shortest_strategy(q);
      assert(best);
      if (lhs > best->cost) return false;
    }
  }
  return true;
}

rational social_cost(const flow& f) {
  rational total(0);
  const auto& inst = f.inst();
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i)
    for (const auto& [p, v] : f.entries(i)) total += v * path_cost(inst, i, p);
  return total;
}

metrics_report metrics(const flow& f) {
  metrics_report report;
  report.social = social_cost(f);
  const auto& inst = f.inst();
  rational total_volume(0);
  rational finite_volume(0);
  rational weighted_rho(0);
  rational zero_regret_volume(0);
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    for (const auto& [p, v] : f.entries(i)) {
      metrics_row row;
      row.commodity = i;
      row.path = p;
      row.volume = v;
      row.cost = path_cost(inst, i, p);
      auto best = best_available_alternative(f, i, p);
      row.best_alt_cost = best.cost;
      row.regret = row.cost - row.best_alt_cost;
      if (row.best_alt_cost == 0) {
        if (row.cost == 0) row.rho = rational(1);
      } else {
        row.rho = row.cost / row.best_alt_cost;
      }
      total_volume += v;
      if (row.regret == 0) zero_regret_volume += v;
      if (row.rho) {
        finite_volume += v;
        weighted_rho += v * *row.rho;
      } else {
        report.mean_has_infinite = true;
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.mean_rho = finite_volume > 0 ? weighted_rho / finite_volume : rational(1);
  report.share_zero_regret =
      total_volume > 0 ? zero_regret_volume / total_volume : rational(1);

  if (total_volume == 0) {
    report.p99_rho = rational(1);
  } else {
    // minimum v covering at least 99% of the volume
    std::vector<const metrics_row*> rows;
    for (const auto& r : report.rows) rows.push_back(&r);
    std::sort(rows.begin(), rows.end(), [](const metrics_row* a, const metrics_row* b) {
      if (a->rho && b->rho) return *a->rho < *b->rho;
      return static_cast<bool>(a->rho) && !b->rho;  // finite before infinite
    });
    rational threshold = total_volume * rational(99, 100);
    rational cum(0);
    for (auto* r : rows) {
      cum += r->volume;
      if (cum >= threshold) {
        report.p99_rho = r->rho;  // nullopt stays infinite
        break;
      }
    }
  }
  return report;
}

std::string strategy_label(const strategy& p) {
  if (p.outside) return "outside";
  if (p.edges.empty()) return "n" + std::to_string(p.start_node);
  std::string label;
  for (auto e : p.edges) {
    if (!label.empty()) label += '-';
    label += 'e' + std::to_string(e);
  }
  return label;
}

std::string metrics_to_csv(const metrics_report& report) {
  std::ostringstream out;
  out << "commodity,path_id,volume,cost,best_alt_cost,regret,approx_factor\n";
  for (const auto& r : report.rows) {
    out << r.commodity << ',' << strategy_label(r.path) << ',' << to_string(r.volume) << ','
        << to_string(r.cost) << ',' << to_string(r.best_alt_cost) << ',' << to_string(r.regret)
        << ',' << (r.rho ? to_string(*r.rho) : std::string("inf")) << '\n';
  }
  out << "mean_rho,p99_rho,share_zero_regret,social_cost\n";
  out << to_string(report.mean_rho) << ','
      << (report.p99_rho ? to_string(*report.p99_rho) : std::string("inf")) << ','
      << to_string(report.share_zero_regret) << ',' << to_string(report.social) << '\n';
  return out.str();
}

flow extend_flow_to_fdt(const instance& original, const instance& transformed, const flow& f) {
  flow out(&transformed);
  const auto& g = transformed.graph;
  for (int i = 0; i < static_cast<int>(original.commodities.size()); ++i) {
    auto start_time = transformed.commodities[i].window_lo;
    for (const auto& [p, v] : f.entries(i)) {
      if (p.outside) {
        out.add(i, p, v);
        continue;
      }
      auto start = g.platform_node(original.commodities[i].origin, start_time);
      if (start < 0 || start > p.start_node)
        throw std::logic_error("no waiting prefix to the fixed departure time");
      strategy ext;
      ext.end_node = p.end_node;
      ext.start_node = start;
      auto v_at = start;
      while (v_at != p.start_node) {
        std::int32_t next = -1;
        for (auto e : g.out_edges[v_at])
          if (g.edges[e].kind == edge_kind::waiting) next = e;
        if (next < 0) throw std::logic_error("waiting chain gap before departure");
        ext.edges.push_back(next);
        v_at = g.edges[next].head;
      }
      ext.edges.insert(ext.edges.end(), p.edges.begin(), p.edges.end());
      out.add(i, ext, v);
    }
  }
  return out;
}

}  // namespace teq
