#include "teq/solver_exact.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <thread>

#include "teq/lp.hpp"

namespace teq {

bool is_blocked_path(const instance& inst, int i, const strategy& p,
                     const std::vector<std::int32_t>& saturated) {
  const auto& g = inst.graph;
  std::set<std::int32_t> sat(saturated.begin(), saturated.end());
  strategy_query q;
  q.inst = &inst;
  q.commodity = i;
  q.boarding_allowed = [&](std::int32_t e) {
    auto succ = g.boarding_successor[e];
    return !sat.count(succ) || p.uses_edge(succ);
  };
  auto best = shortest_strategy(q);
  assert(best);
  return best->cost < path_cost(inst, i, p);
}

namespace {

// Pre-tabulated strategies with bitmasks over the candidate edges; the
// forced-zero computation per subset is then pure 64-bit arithmetic.
struct exact_tables {
  std::vector<std::int32_t> candidates;  // driving edge ids, ascending
  struct entry {
    strategy path;
    rational cost;
    std::uint64_t board_mask = 0;  // boarding successors among candidates
    std::uint64_t drive_mask = 0;  // driving edges among candidates
  };
  std::vector<std::vector<entry>> per_commodity;  // sorted by (cost, canonical)
  // max demand that could ever reach a driving edge, by edge id
  std::map<std::int32_t, rational> max_load;
};

std::optional<exact_tables> build_tables(const instance& inst, const exact_limits& limits,
                                         std::string& limit_reason) {
  const auto& g = inst.graph;
  exact_tables t;
  std::size_t total = 0;
  t.per_commodity.resize(inst.commodities.size());
  std::set<std::int32_t> boarded;
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    std::vector<strategy> strategies;
    try {
      strategies = enumerate_strategies(inst, i, limits.path_cap);
    } catch (const path_enumeration_overflow&) {
      limit_reason = "strategy enumeration exceeded the path cap";
      return std::nullopt;
    }
    total += strategies.size();
    if (total > limits.path_cap) {
      limit_reason = "combined strategy count exceeded the path cap";
      return std::nullopt;
    }
    auto& rows = t.per_commodity[i];
    for (auto& p : strategies) {
      exact_tables::entry e;
      e.cost = path_cost(inst, i, p);
      for (auto b : p.boarding_edges(g)) boarded.insert(g.boarding_successor[b]);
      e.path = std::move(p);
      rows.push_back(std::move(e));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const exact_tables::entry& a, const exact_tables::entry& b) {
                       if (a.cost != b.cost) return a.cost < b.cost;
                       return a.path < b.path;
                     });
  }
  // max attainable load per edge: sum of demands over commodities that can
  // route through it at all
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    std::set<std::int32_t> used;
    for (const auto& e : t.per_commodity[i])
      for (auto d : e.path.driving_edges(g)) used.insert(d);
    for (auto d : used) t.max_load[d] += inst.commodities[i].demand;
  }
  for (auto e : boarded)
    if (t.max_load.at(e) >= g.edges[e].capacity) t.candidates.push_back(e);
  std::sort(t.candidates.begin(), t.candidates.end());

  if (static_cast<int>(t.candidates.size()) > limits.max_saturated_candidates) {
    limit_reason = "candidate saturated edges exceed the limit (" +
                   std::to_string(t.candidates.size()) + " > " +
                   std::to_string(limits.max_saturated_candidates) + ")";
    return std::nullopt;
  }
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    for (auto& e : t.per_commodity[i]) {
      for (auto b : e.path.boarding_edges(g)) {
        auto succ = g.boarding_successor[b];
        auto it = std::lower_bound(t.candidates.begin(), t.candidates.end(), succ);
        if (it != t.candidates.end() && *it == succ)
          e.board_mask |= 1ull << (it - t.candidates.begin());
      }
      for (auto d : e.path.driving_edges(g)) {
        auto it = std::lower_bound(t.candidates.begin(), t.candidates.end(), d);
        if (it != t.candidates.end() && *it == d)
          e.drive_mask |= 1ull << (it - t.candidates.begin());
      }
    }
  }
  return t;
}

// forced zeros under subset mask; returns one bitset per commodity
std::vector<std::vector<char>> blocked_under(const exact_tables& t, std::uint64_t mask) {
  std::vector<std::vector<char>> blocked(t.per_commodity.size());
  for (std::size_t i = 0; i < t.per_commodity.size(); ++i) {
    const auto& rows = t.per_commodity[i];
    blocked[i].assign(rows.size(), 0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (std::size_t j = 0; j < k; ++j) {
        if (!(rows[j].cost < rows[k].cost)) break;  // rows sorted by cost
        if ((rows[j].board_mask & mask & ~rows[k].drive_mask) == 0) {
          blocked[i][k] = 1;
          break;
        }
      }
    }
  }
  return blocked;
}

struct subset_eval {
  bool feasible = false;
  std::optional<flow> solution;
  bool want_costs = false;
  rational min_cost, max_cost;
};

subset_eval evaluate_subset(const instance& inst, const exact_tables& t, std::uint64_t mask,
                            bool forbid_outside, bool want_costs) {
  subset_eval ev;
  ev.want_costs = want_costs;
  const auto& g = inst.graph;
  auto blocked = blocked_under(t, mask);

  // quick refutations before building the LP
  for (std::size_t i = 0; i < t.per_commodity.size(); ++i) {
    if (inst.commodities[i].demand == 0) continue;
    bool any = false;
    for (std::size_t k = 0; k < t.per_commodity[i].size() && !any; ++k)
      if (!blocked[i][k] && !(forbid_outside && t.per_commodity[i][k].path.outside)) any = true;
    if (!any) return ev;
  }
  for (std::size_t b = 0; b < t.candidates.size(); ++b) {
    if (!(mask >> b & 1)) continue;
    rational reachable(0);
    for (std::size_t i = 0; i < t.per_commodity.size(); ++i) {
      const auto& rows = t.per_commodity[i];
      for (std::size_t k = 0; k < rows.size(); ++k)
        if (!blocked[i][k] && (rows[k].drive_mask >> b & 1)) {
          reachable += inst.commodities[i].demand;
          break;
        }
    }
    if (reachable < g.edges[t.candidates[b]].capacity) return ev;
  }

  lp_problem p;
  std::vector<std::pair<int, int>> var_index;  // (commodity, row index)
  std::vector<lp_row> demand_rows(t.per_commodity.size());
  std::map<std::int32_t, lp_row> cap_rows;
  for (std::size_t i = 0; i < t.per_commodity.size(); ++i) {
    demand_rows[i].rel = '=';
    demand_rows[i].rhs = inst.commodities[i].demand;
    const auto& rows = t.per_commodity[i];
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (blocked[i][k]) continue;
      if (forbid_outside && rows[k].path.outside) continue;
      int var = static_cast<int>(var_index.size());
      var_index.push_back({static_cast<int>(i), static_cast<int>(k)});
      if (want_costs) p.objective.push_back(rows[k].cost);
      demand_rows[i].coeffs.push_back({var, rational(1)});
      for (auto d : rows[k].path.driving_edges(g))
        cap_rows[d].coeffs.push_back({var, rational(1)});
    }
  }
  p.num_vars = static_cast<int>(var_index.size());
  for (auto& r : demand_rows) p.rows.push_back(std::move(r));
  for (std::size_t b = 0; b < t.candidates.size(); ++b)
    if (mask >> b & 1) cap_rows[t.candidates[b]];  // ensure the equality row exists
  for (auto& [e, row] : cap_rows) {
    auto it = std::lower_bound(t.candidates.begin(), t.candidates.end(), e);
    bool saturated = it != t.candidates.end() && *it == e &&
                     (mask >> (it - t.candidates.begin()) & 1);
    row.rel = saturated ? '=' : '<';
    row.rhs = g.edges[e].capacity;
    p.rows.push_back(std::move(row));
  }

  auto build_flow = [&](const std::vector<rational>& x) {
    flow f(&inst);
    for (std::size_t v = 0; v < var_index.size(); ++v) {
      if (x[v] == 0) continue;
      auto [i, k] = var_index[v];
      f.add(i, t.per_commodity[i][k].path, x[v]);
    }
    return f;
  };

  if (!want_costs) {
    auto sol = lp_feasible(p);
    if (sol.status != lp_status::optimal) return ev;
    ev.feasible = true;
    ev.solution = build_flow(sol.x);
    return ev;
  }
  auto min_sol = lp_solve(p);
  if (min_sol.status != lp_status::optimal) return ev;
  ev.feasible = true;
  ev.min_cost = min_sol.objective;
  ev.solution = build_flow(min_sol.x);
  for (auto& c : p.objective) c = -c;
  auto max_sol = lp_solve(p);
  assert(max_sol.status == lp_status::optimal);
  ev.max_cost = -max_sol.objective;
  return ev;
}

// subsets by cardinality, then ascending candidate-index combinations
class subset_enumerator {
 public:
  explicit subset_enumerator(int n) : n_(n) {}
  std::optional<std::uint64_t> next() {
    if (k_ > n_) return std::nullopt;
    if (k_ == 0) {
      ++k_;
      init_ = false;
      return 0ull;
    }
    if (!init_) {
      comb_.resize(k_);
      for (int j = 0; j < k_; ++j) comb_[j] = j;
      init_ = true;
      return to_mask();
    }
    int j = k_ - 1;
    while (j >= 0 && comb_[j] == n_ - k_ + j) --j;
    if (j < 0) {
      ++k_;
      init_ = false;
      return next();
    }
    ++comb_[j];
    for (int l = j + 1; l < k_; ++l) comb_[l] = comb_[l - 1] + 1;
    return to_mask();
  }

 private:
  std::uint64_t to_mask() const {
    std::uint64_t m = 0;
    for (auto c : comb_) m |= 1ull << c;
    return m;
  }
  int n_, k_ = 0;
  bool init_ = false;
  std::vector<int> comb_;
};

template <typename on_result>
void scan_subsets(const instance& inst, const exact_tables& t, const exact_limits& limits,
                  bool want_costs, std::uint64_t& tested, const on_result& handle) {
  subset_enumerator gen(static_cast<int>(t.candidates.size()));
  int jobs = std::max(1, limits.jobs);
  if (jobs == 1) {
    while (auto mask = gen.next()) {
      ++tested;
      if (handle(evaluate_subset(inst, t, *mask, limits.forbid_outside, want_costs))) return;
    }
    return;
  }
  const std::size_t batch_size = 1024;
  std::vector<std::uint64_t> batch;
  std::vector<subset_eval> results;
  for (;;) {
    batch.clear();
    while (batch.size() < batch_size) {
      auto mask = gen.next();
      if (!mask) break;
      batch.push_back(*mask);
    }
    if (batch.empty()) return;
    results.assign(batch.size(), subset_eval{});
    std::vector<std::thread> workers;
    std::size_t stride = jobs;
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&, w] {
        for (std::size_t idx = w; idx < batch.size(); idx += stride)
          results[idx] =
              evaluate_subset(inst, t, batch[idx], limits.forbid_outside, want_costs);
      });
    for (auto& th : workers) th.join();
    for (auto& r : results) {
      ++tested;
      if (handle(std::move(r))) return;
    }
    if (batch.size() < batch_size) return;
  }
}

}  // namespace

std::optional<flow> feasibility(const instance& inst,
                                const std::vector<std::int32_t>& saturated,
                                std::size_t path_cap, bool forbid_outside) {
  const auto& g = inst.graph;
  lp_problem p;
  std::vector<std::pair<int, strategy>> var_index;
  std::vector<lp_row> demand_rows(inst.commodities.size());
  std::map<std::int32_t, lp_row> cap_rows;
  std::set<std::int32_t> sat(saturated.begin(), saturated.end());
  for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
    demand_rows[i].rel = '=';
    demand_rows[i].rhs = inst.commodities[i].demand;
    for (auto& q : enumerate_strategies(inst, i, path_cap)) {
      if (is_blocked_path(inst, i, q, saturated)) continue;
      if (forbid_outside && q.outside) continue;
      int var = static_cast<int>(var_index.size());
      demand_rows[i].coeffs.push_back({var, rational(1)});
      for (auto d : q.driving_edges(g)) cap_rows[d].coeffs.push_back({var, rational(1)});
      var_index.push_back({i, std::move(q)});
    }
  }
  p.num_vars = static_cast<int>(var_index.size());
  for (auto& r : demand_rows) p.rows.push_back(std::move(r));
  for (auto e : sat) cap_rows[e];
  for (auto& [e, row] : cap_rows) {
    row.rel = sat.count(e) ? '=' : '<';
    row.rhs = g.edges[e].capacity;
    p.rows.push_back(std::move(row));
  }
  auto sol = lp_feasible(p);
  if (sol.status != lp_status::optimal) return std::nullopt;
  flow f(&inst);
  for (std::size_t v = 0; v < var_index.size(); ++v)
    if (sol.x[v] != 0) f.add(var_index[v].first, var_index[v].second, sol.x[v]);
  return f;
}

exact_result solve_exact(const instance& inst, const exact_limits& limits) {
  exact_result res;
  std::string reason;
  auto tables = build_tables(inst, limits, reason);
  if (!tables) {
    res.outcome = exact_outcome::resource_limit;
    res.limit_reason = std::move(reason);
    return res;
  }
  scan_subsets(inst, *tables, limits, /*want_costs=*/false, res.subsets_tested,
               [&](subset_eval ev) {
                 if (!ev.feasible) return false;
                 res.outcome = exact_outcome::equilibrium;
                 res.solution = std::move(ev.solution);
                 return true;
               });
  if (res.outcome == exact_outcome::equilibrium) {
    assert(verify_equilibrium(*res.solution).ok());
  }
  return res;
}

cost_range_result enumerate_equilibrium_costs(const instance& inst,
                                              const exact_limits& limits) {
  cost_range_result res;
  std::string reason;
  auto tables = build_tables(inst, limits, reason);
  if (!tables) {
    res.resource_limit = true;
    res.limit_reason = std::move(reason);
    return res;
  }
  scan_subsets(inst, *tables, limits, /*want_costs=*/true, res.subsets_tested,
               [&](subset_eval ev) {
                 if (!ev.feasible) return false;
                 if (!res.any) {
                   res.any = true;
                   res.min_cost = ev.min_cost;
                   res.max_cost = ev.max_cost;
                 } else {
                   res.min_cost = std::min(res.min_cost, ev.min_cost);
                   res.max_cost = std::max(res.max_cost, ev.max_cost);
                 }
                 return false;
               });
  return res;
}

}  // namespace teq
