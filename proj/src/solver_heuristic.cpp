#include "teq/solver_heuristic.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <random>
#include <sstream>
#include <stdexcept>

#include "teq/sysopt.hpp"

namespace teq {

rational direction::delta(int i, const strategy& p) const {
  auto it = deltas_[i].find(p);
  return it == deltas_[i].end() ? rational(0) : it->second;
}

void direction::add(int i, const strategy& p, const rational& d) {
  if (d == 0) return;
  auto [it, inserted] = deltas_[i].try_emplace(p, rational(0));
  it->second += d;
  if (it->second == 0) deltas_[i].erase(it);
}

bool direction::empty() const {
  for (const auto& m : deltas_)
    if (!m.empty()) return false;
  return true;
}

bool direction::balanced() const {
  for (const auto& m : deltas_) {
    rational sum(0);
    for (const auto& [p, d] : m) sum += d;
    if (sum != 0) return false;
  }
  return true;
}

direction& direction::operator+=(const direction& other) {
  for (std::size_t i = 0; i < deltas_.size(); ++i)
    for (const auto& [p, d] : other.deltas_[i]) add(static_cast<int>(i), p, d);
  return *this;
}

std::vector<std::tuple<int, strategy, int>> direction::signature() const {
  std::vector<std::tuple<int, strategy, int>> sig;
  for (std::size_t i = 0; i < deltas_.size(); ++i)
    for (const auto& [p, d] : deltas_[i])
      sig.push_back({static_cast<int>(i), p, d > 0 ? 1 : -1});
  return sig;
}

std::vector<rational> direction_edge_deltas(const instance& inst, const direction& d) {
  std::vector<rational> out(inst.graph.num_edges(), rational(0));
  for (std::size_t i = 0; i < d.num_commodities(); ++i)
    for (const auto& [p, delta] : d.deltas(static_cast<int>(i)))
      for (auto e : p.edges) out[e] += delta;
  return out;
}

namespace {

void check_support(const flow& f, const direction& d) {
  for (std::size_t i = 0; i < d.num_commodities(); ++i)
    for (const auto& [p, delta] : d.deltas(static_cast<int>(i)))
      if (delta < 0 && f.volume(static_cast<int>(i), p) <= 0)
        throw std::invalid_argument("direction removes flow from an unused path");
}

std::int32_t find_offending_boarding(const flow& f, const std::vector<rational>& edge_delta) {
  const auto& g = f.inst().graph;
  for (std::int32_t e = 0; e < static_cast<std::int32_t>(g.num_edges()); ++e) {
    if (g.edges[e].kind != edge_kind::boarding) continue;
    auto succ = g.boarding_successor[e];
    if (f.edge_load(succ) != g.edges[succ].capacity) continue;
    if (edge_delta[succ] <= 0) continue;
    if (f.edge_load(e) > 0 || edge_delta[e] > 0) return e;
  }
  return -1;
}

}  // namespace

bool is_feasible_direction(const flow& f, const direction& d) {
  check_support(f, d);
  auto edge_delta = direction_edge_deltas(f.inst(), d);
  return find_offending_boarding(f, edge_delta) < 0;
}

direction repair_direction(const flow& f, direction d) {
  check_support(f, d);
  const auto& inst = f.inst();
  const auto& g = inst.graph;
  auto edge_delta = direction_edge_deltas(inst, d);

  auto apply = [&](int i, const strategy& p, const rational& delta) {
    d.add(i, p, delta);
    for (auto e : p.edges) edge_delta[e] += delta;
  };

  std::size_t guard = 0;
  for (;;) {
    auto e = find_offending_boarding(f, edge_delta);
    if (e < 0) break;
    if (++guard > 4 * g.num_edges() * (f.inst().commodities.size() + 4) + 1024)
      throw std::logic_error("direction repair failed to terminate");
    auto succ = g.boarding_successor[e];

    // carrier through the offending boarding edge: positive delta preferred,
    // then the largest flow, then canonical order
    int carrier_i = -1;
    const strategy* carrier = nullptr;
    bool carrier_positive = false;
    rational carrier_flow;
    auto consider = [&](int i, const strategy& p, const rational& vol, bool positive) {
      if (!p.uses_edge(e)) return;
      if (carrier) {
        if (carrier_positive && !positive) return;
        if (positive == carrier_positive) {
          if (vol < carrier_flow) return;
          if (vol == carrier_flow &&
              std::pair(carrier_i, *carrier) <= std::pair(i, p))
            return;
        }
      }
      carrier_i = i;
      carrier = &p;
      carrier_positive = positive;
      carrier_flow = vol;
    };
    for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
      for (const auto& [p, delta] : d.deltas(i))
        if (delta > 0) consider(i, p, f.volume(i, p), true);
      for (const auto& [p, vol] : f.entries(i)) consider(i, p, vol, false);
    }
    if (!carrier) throw std::logic_error("offending boarding edge without carrier");

    rational delta = f.volume(carrier_i, *carrier) > 0
                         ? edge_delta[succ]
                         : std::min(edge_delta[succ], d.delta(carrier_i, *carrier));
    strategy carrier_path = *carrier;  // detached: apply() mutates d
    apply(carrier_i, carrier_path, -delta);

    while (delta > 0) {
      strategy_query q;
      q.inst = &inst;
      q.commodity = carrier_i;
      q.driving_allowed = [&](std::int32_t de) {
        return !(f.edge_load(de) == g.edges[de].capacity && edge_delta[de] >= 0);
      };
      auto best = shortest_strategy(q);
      assert(best);  // the outside option has no driving edges
      rational chunk = delta;
      for (auto de : best->path.driving_edges(g))
        if (f.edge_load(de) == g.edges[de].capacity) {
          rational headroom = -edge_delta[de];
          chunk = std::min(chunk, headroom);
        }
      apply(carrier_i, best->path, chunk);
      delta -= chunk;
    }
  }
  return d;
}

rational max_step(const flow& f, const direction& d) {
  const auto& inst = f.inst();
  const auto& g = inst.graph;
  auto edge_delta = direction_edge_deltas(inst, d);
  bool bounded = false;
  rational lambda;
  auto tighten = [&](const rational& bound) {
    if (!bounded || bound < lambda) {
      bounded = true;
      lambda = bound;
    }
  };
  for (std::size_t i = 0; i < d.num_commodities(); ++i)
    for (const auto& [p, delta] : d.deltas(static_cast<int>(i)))
      if (delta < 0) tighten(f.volume(static_cast<int>(i), p) / -delta);
  for (auto e : g.driving_edges)
    if (edge_delta[e] > 0) tighten((g.edges[e].capacity - f.edge_load(e)) / edge_delta[e]);
  if (!bounded) throw std::invalid_argument("direction admits unbounded steps");
  if (lambda <= 0) throw std::logic_error("max_step on an infeasible direction");
  return lambda;
}

flow fixed_initial_solution(const instance& inst) {
  const auto& g = inst.graph;
  flow f_in(&inst);
  bool progress = true;
  while (progress) {
    progress = false;
    for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
      const auto& c = inst.commodities[i];
      rational residual = c.demand - f_in.routed_volume(i);
      if (residual <= 0) continue;
      strategy_query q;
      q.inst = &inst;
      q.commodity = i;
      q.include_outside = false;
      q.boarding_allowed = [&](std::int32_t e) {
        auto succ = g.boarding_successor[e];
        if (f_in.edge_load(succ) >= g.edges[succ].capacity) return false;
        auto prev = g.previous_driving[succ];
        // uninterruptible: no unsaturated driving edge right before the boarding
        return prev < 0 || f_in.edge_load(prev) == g.edges[prev].capacity;
      };
      auto best = shortest_strategy(q);
      if (!best || !(best->cost < c.outside_cost)) continue;
      rational lambda = residual;
      for (auto e : best->path.boarding_edges(g)) {
        auto succ = g.boarding_successor[e];
        rational headroom = g.edges[succ].capacity - f_in.edge_load(succ);
        lambda = std::min(lambda, headroom);
      }
      if (lambda <= 0) continue;
      f_in.add(i, best->path, lambda);
      assert(f_in.capacity_feasible());
      progress = true;
    }
  }
  return f_in;
}

flow warm_start(const instance& inst, const flow& initial) {
  return solve_system_optimum_residual(inst, initial);
}

namespace {

struct scored_state {
  metrics_report report;
  struct move {
    int commodity;
    strategy from;
    strategy to;
    rational regret;
  };
  std::vector<move> moves;
};

scored_state score(const flow& f) {
  scored_state s;
  s.report = metrics(f);
  for (const auto& row : s.report.rows) {
    if (row.regret > 0) {
      auto best = best_available_alternative(f, row.commodity, row.path);
      s.moves.push_back({row.commodity, row.path, best.path, row.regret});
    }
  }
  return s;
}

bool better_metrics(const metrics_report& a, const metrics_report& b) {
  if (a.mean_has_infinite != b.mean_has_infinite) return !a.mean_has_infinite;
  return a.mean_rho < b.mean_rho;
}

}  // namespace

std::string trace_to_csv(const std::vector<heuristic_trace_row>& trace) {
  std::ostringstream out;
  out << "iter,selected_commodity,regret,lambda,mean_rho,p99_rho,social_cost\n";
  for (const auto& r : trace) {
    out << r.iter << ',' << r.commodity << ',' << to_string(r.regret) << ','
        << to_string(r.lambda) << ',' << to_string(r.mean_rho) << ','
        << (r.p99_rho ? to_string(*r.p99_rho) : std::string("inf")) << ','
        << to_string(r.social);
    if (!r.note.empty()) out << ',' << r.note;
    out << '\n';
  }
  return out.str();
}

heuristic_result solve_heuristic(const instance& inst, const heuristic_config& config) {
  if (config.iter_cap <= 0 || config.cycle_window < 0 || config.restart_limit < 0)
    throw std::invalid_argument("bad heuristic configuration");
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(config.budget_secs));

  flow prefill(&inst);
  if (config.prefill) prefill = fixed_initial_solution(inst);
  auto initial_flow = [&]() {
    flow f = config.use_warm_start ? warm_start(inst, prefill) : prefill;
    for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
      rational residual = inst.commodities[i].demand - f.routed_volume(i);
      if (residual > 0) f.add(i, outside_strategy(), residual);
    }
    return f;
  };

  heuristic_result res;
  flow f = initial_flow();
  auto state = score(f);
  res.best = f;
  res.best_metrics = state.report;

  auto selection = config.selection;
  std::mt19937_64 rng(config.seed);
  std::vector<direction> window;

  // all strategies with costs, enumerated lazily for the random rule
  std::vector<std::vector<std::pair<strategy, rational>>> all_strategies;
  auto random_moves = [&]() {
    if (all_strategies.empty()) {
      all_strategies.resize(inst.commodities.size());
      for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i)
        for (auto& q : enumerate_strategies(inst, i, config.path_cap))
          all_strategies[i].push_back({q, path_cost(inst, i, q)});
    }
    std::vector<scored_state::move> moves;
    for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i) {
      for (const auto& [p, volume] : f.entries(i)) {
        rational cost_p = path_cost(inst, i, p);
        for (const auto& [q, cost_q] : all_strategies[i]) {
          if (!(cost_q < cost_p)) continue;
          if (is_available_alternative(f, i, p, q))
            moves.push_back({i, p, q, cost_p - cost_q});
        }
      }
    }
    return moves;
  };

  auto check_invariants = [&](const flow& cur) {
    if (!config.check_invariants) return;
    if (!cur.feasible()) throw std::logic_error("heuristic produced an infeasible flow");
    if (config.prefill)
      for (int i = 0; i < static_cast<int>(inst.commodities.size()); ++i)
        for (const auto& [p, v] : prefill.entries(i))
          if (cur.volume(i, p) < v)
            throw std::logic_error("heuristic decreased the fixed initial solution");
  };
  check_invariants(f);

  auto record = [&](const direction& d, const rational& lambda, int commodity,
                    const rational& regret, const std::string& note) {
    ++res.iterations;
    state = score(f);
    res.trace.push_back({res.iterations, commodity, regret, lambda, state.report.mean_rho,
                         state.report.p99_rho, state.report.social, note});
    if (better_metrics(state.report, res.best_metrics)) {
      res.best = f;
      res.best_metrics = state.report;
    }
    (void)d;
  };

  auto apply_direction = [&](const direction& d, const rational& lambda) {
    for (std::size_t i = 0; i < d.num_commodities(); ++i)
      for (const auto& [p, delta] : d.deltas(static_cast<int>(i)))
        f.add(static_cast<int>(i), p, lambda * delta);
    check_invariants(f);
  };

  // returns true when the search should restart from the initial flow
  auto handle_vanishing = [&]() {
    window.clear();
    if (selection == heuristic_config::selection_rule::max_regret) {
      selection = heuristic_config::selection_rule::random;
      return false;
    }
    return true;
  };

  while (res.iterations < config.iter_cap &&
         std::chrono::steady_clock::now() < deadline) {
    if (state.moves.empty()) {
      res.equilibrium = true;
      res.best = f;
      res.best_metrics = state.report;
      assert(verify_equilibrium(f).ok());
      return res;
    }
    scored_state::move move;
    if (selection == heuristic_config::selection_rule::random) {
      auto moves = random_moves();
      assert(!moves.empty());  // state.moves was non-empty
      move = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
    } else {
      std::size_t pick = 0;
      for (std::size_t k = 1; k < state.moves.size(); ++k)
        if (state.moves[k].regret > state.moves[pick].regret) pick = k;
      move = state.moves[pick];
    }

    direction d(inst.commodities.size());
    d.add(move.commodity, move.to, rational(1));
    d.add(move.commodity, move.from, rational(-1));
    d = repair_direction(f, d);

    bool restart = false;
    if (d.empty()) {
      restart = handle_vanishing();
    } else {
      rational lambda = max_step(f, d);
      apply_direction(d, lambda);
      record(d, lambda, move.commodity, move.regret, "");
      if (config.cycle_window > 0) {
        window.push_back(d);
        if (static_cast<int>(window.size()) > config.cycle_window)
          window.erase(window.begin());
        // the block of the last L signatures repeating twice is a cycle
        for (std::size_t len = 1; 2 * len <= window.size(); ++len) {
          bool repeat = true;
          for (std::size_t k = 0; k < len && repeat; ++k) {
            auto a = window[window.size() - 1 - k].signature();
            auto b = window[window.size() - 1 - len - k].signature();
            repeat = a == b;
          }
          if (!repeat) continue;
          direction sum(inst.commodities.size());
          for (std::size_t k = 0; k < len; ++k) sum += window[window.size() - len + k];
          if (sum.empty()) {
            restart = handle_vanishing();
          } else {
            bool support_ok = true;
            for (std::size_t i = 0; i < sum.num_commodities() && support_ok; ++i)
              for (const auto& [p, delta] : sum.deltas(static_cast<int>(i)))
                if (delta < 0 && f.volume(static_cast<int>(i), p) <= 0) {
                  support_ok = false;
                  break;
                }
            if (support_ok && is_feasible_direction(f, sum)) {
              rational lambda2 = max_step(f, sum);
              apply_direction(sum, lambda2);
              record(sum, lambda2, -1, rational(0), "compressed");
              window.clear();
            }
          }
          break;
        }
      }
    }
    if (restart) {
      ++res.restarts;
      if (res.restarts > config.restart_limit) break;
      rng.seed(config.seed + static_cast<std::uint64_t>(res.restarts));
      f = initial_flow();
      check_invariants(f);
      state = score(f);
      if (better_metrics(state.report, res.best_metrics)) {
        res.best = f;
        res.best_metrics = state.report;
      }
    }
  }
  return res;
}

}  // namespace teq
