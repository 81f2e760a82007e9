#include "teq/sysopt.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace teq {

namespace {

struct master_builder {
  const instance& inst;
  // residual capacities and demands (plain system optimum uses the originals)
  std::vector<rational> capacity;  // indexed by position in driving_edges
  std::vector<rational> demand;
  std::vector<std::vector<strategy>> columns;  // per commodity
  std::map<std::int32_t, int> capacity_row;    // driving edge -> row index

  explicit master_builder(const instance& in) : inst(in) {
    const auto& g = inst.graph;
    for (auto e : g.driving_edges) capacity.push_back(g.edges[e].capacity);
    for (const auto& c : inst.commodities) demand.push_back(c.demand);
    columns.resize(inst.commodities.size());
  }

  lp_problem build(std::vector<std::pair<int, int>>& var_index) const {
    lp_problem p;
    var_index.clear();
    const auto& g = inst.graph;
    std::vector<lp_row> demand_rows(inst.commodities.size());
    std::vector<lp_row> cap_rows(g.driving_edges.size());
    for (std::size_t i = 0; i < inst.commodities.size(); ++i) {
      demand_rows[i].rel = '=';
      demand_rows[i].rhs = demand[i];
    }
    for (std::size_t r = 0; r < g.driving_edges.size(); ++r) {
      cap_rows[r].rel = '<';
      cap_rows[r].rhs = capacity[r];
    }
    std::map<std::int32_t, int> edge_row;
    for (std::size_t r = 0; r < g.driving_edges.size(); ++r)
      edge_row[g.driving_edges[r]] = static_cast<int>(r);

    for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
      for (int k = 0; k < static_cast<int>(columns[i].size()); ++k) {
        int var = static_cast<int>(var_index.size());
        var_index.push_back({i, k});
        p.objective.push_back(path_cost(inst, i, columns[i][k]));
        demand_rows[i].coeffs.push_back({var, rational(1)});
        for (auto e : columns[i][k].driving_edges(g))
          cap_rows[edge_row.at(e)].coeffs.push_back({var, rational(1)});
      }
    }
    p.num_vars = static_cast<int>(var_index.size());
    for (auto& r : demand_rows) p.rows.push_back(std::move(r));
    for (auto& r : cap_rows) p.rows.push_back(std::move(r));
    return p;
  }
};

flow column_generation(const instance& inst, master_builder& master, const flow* frozen) {
  const auto& g = inst.graph;
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    master.columns[i].push_back(outside_strategy());
    strategy_query q;
    q.inst = &inst;
    q.commodity = i;
    auto best = shortest_strategy(q);
    if (best && !best->path.outside) master.columns[i].push_back(best->path);
  }

  std::vector<std::pair<int, int>> var_index;
  lp_solution sol;
  for (;;) {
    auto problem = master.build(var_index);
    sol = lp_solve(problem);
    if (sol.status != lp_status::optimal)
      throw std::logic_error("system-optimum master must stay feasible");
    // duals: demand rows first, then capacity rows in driving-edge order
    bool added = false;
    for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
      auto priced = price_column(inst, i, sol.row_duals[i], [&](std::int32_t e) {
        auto pos = std::lower_bound(g.driving_edges.begin(), g.driving_edges.end(), e) -
                   g.driving_edges.begin();
        return sol.row_duals[inst.commodities.size() + pos];
      });
      if (priced.cost < 0) {
        // exact arithmetic: a duplicate column cannot price negatively
        auto& cols = master.columns[i];
        if (std::find(cols.begin(), cols.end(), priced.path) != cols.end())
          throw std::logic_error("column generation re-priced an existing column");
        cols.push_back(priced.path);
        added = true;
      }
    }
    if (!added) break;
  }

  flow out = frozen ? *frozen : flow(&inst);
  for (std::size_t v = 0; v < var_index.size(); ++v) {
    if (sol.x[v] == 0) continue;
    auto [i, k] = var_index[v];
    out.add(i, master.columns[i][k], sol.x[v]);
  }
  return out;
}

}  // namespace

strategy_result price_column(const instance& inst, int i, const rational& demand_dual,
                             const std::function<rational(std::int32_t)>& capacity_dual) {
  strategy_query q;
  q.inst = &inst;
  q.commodity = i;
  q.driving_adjust = capacity_dual;
  auto best = shortest_strategy(q);
  assert(best);  // outside option
  best->cost -= demand_dual;
  return *best;
}

flow solve_system_optimum(const instance& inst) {
  master_builder master(inst);
  return column_generation(inst, master, nullptr);
}

flow solve_system_optimum_residual(const instance& inst, const flow& frozen) {
  master_builder master(inst);
  const auto& g = inst.graph;
  for (std::size_t r = 0; r < g.driving_edges.size(); ++r) {
    master.capacity[r] -= frozen.edge_load(g.driving_edges[r]);
    if (master.capacity[r] < 0)
      throw std::invalid_argument("frozen flow exceeds capacities");
  }
  for (std::size_t i = 0; i < inst.commodities.size(); ++i) {
    master.demand[i] -= frozen.routed_volume(static_cast<int>(i));
    if (master.demand[i] < 0)
      throw std::invalid_argument("frozen flow exceeds demand");
  }
  return column_generation(inst, master, &frozen);
}

flow solve_system_optimum_full(const instance& inst, std::size_t path_cap) {
  master_builder master(inst);
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i)
    master.columns[i] = enumerate_strategies(inst, i, path_cap);
  std::vector<std::pair<int, int>> var_index;
  auto problem = master.build(var_index);
  auto sol = lp_solve(problem);
  if (sol.status != lp_status::optimal)
    throw std::logic_error("full system-optimum LP must be feasible");
  flow out(&inst);
  for (std::size_t v = 0; v < var_index.size(); ++v) {
    if (sol.x[v] == 0) continue;
    auto [i, k] = var_index[v];
    out.add(i, master.columns[i][k], sol.x[v]);
  }
  return out;
}

}  // namespace teq
