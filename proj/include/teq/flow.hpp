#ifndef TEQ_FLOW_HPP
#define TEQ_FLOW_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "teq/paths.hpp"

namespace teq {

// Path-based flow with cached edge loads. Snapshots are value types; all
// verifiers and metrics are read-only.
class flow {
 public:
  flow() = default;
  explicit flow(const instance* inst);

  const instance& inst() const { return *inst_; }
  const std::map<strategy, rational>& entries(int i) const { return entries_[i]; }
  rational volume(int i, const strategy& p) const;
  rational routed_volume(int i) const;
  void add(int i, const strategy& p, const rational& delta);
  void set(int i, const strategy& p, const rational& value);

  const std::vector<rational>& edge_loads() const { return loads_; }
  const rational& edge_load(std::int32_t e) const { return loads_[e]; }

  bool demand_feasible() const;
  bool capacity_feasible() const;
  bool feasible() const { return demand_feasible() && capacity_feasible(); }

  struct entry {
    int commodity;
    strategy path;
    rational volume;
  };
  std::vector<entry> sorted_entries() const;  // canonical (commodity, strategy) order

  std::vector<rational> recomputed_loads() const;  // from scratch, for invariant checks

  friend bool operator==(const flow& a, const flow& b) {
    return a.entries_ == b.entries_;
  }

 private:
  const instance* inst_ = nullptr;
  std::vector<std::map<strategy, rational>> entries_;
  std::vector<rational> loads_;
};

// f + eps * (1_{i,q} - 1_{i,p}); requires 0 < eps <= f_{i,p}.
flow deviate(const flow& f, int i, const strategy& p, const strategy& q, const rational& eps);

// Whether the eps-deviation keeps every boarding edge of q within capacity.
bool is_admissible(const flow& f, int i, const strategy& p, const strategy& q,
                   const rational& eps);

// The eps-free form: q is admissible for arbitrarily small eps, i.e. all
// boarding edges e of q satisfy f_{e+} < nu if e+ not in p, <= nu if e+ in p.
bool is_available_alternative(const flow& f, int i, const strategy& p, const strategy& q);

// Cheapest strategy among the available alternatives to p (always contains
// the outside option, and p itself when p is admissible at current loads).
strategy_result best_available_alternative(const flow& f, int i, const strategy& p);

struct equilibrium_violation {
  int commodity;
  strategy path;
  strategy alternative;
  rational path_cost;
  rational alternative_cost;
};

struct verify_result {
  enum class status { equilibrium, infeasible, violation };
  status outcome = status::equilibrium;
  std::optional<equilibrium_violation> first;
  int violation_count = 0;
  bool ok() const { return outcome == status::equilibrium; }
};

// Definition-level check: scans all enumerated strategies per used path.
verify_result verify_equilibrium(const flow& f, std::size_t path_cap = 1'000'000);

// Quasi-variational form: no admissible elementary deviation improves.
bool verify_qvi(const flow& f);

// Bernstein-Smith form with the discontinuous boarding costs, the liminf
// evaluated exactly via the M-threshold cases.
bool verify_bs(const flow& f);

struct metrics_row {
  int commodity;
  strategy path;
  rational volume;
  rational cost;
  rational best_alt_cost;
  rational regret;
  std::optional<rational> rho;  // nullopt: infinite (cost > 0, best alternative 0)
};

struct metrics_report {
  std::vector<metrics_row> rows;
  rational mean_rho;       // volume-weighted over finite rows; 1 when empty
  bool mean_has_infinite = false;
  std::optional<rational> p99_rho;  // nullopt: infinite
  rational share_zero_regret;
  rational social;
};

metrics_report metrics(const flow& f);
rational social_cost(const flow& f);

// header: commodity,path_id,volume,cost,best_alt_cost,regret,approx_factor
// plus a summary row mean_rho,p99_rho,share_zero_regret,social_cost
std::string metrics_to_csv(const metrics_report& report);

std::string strategy_label(const strategy& p);

// Reroutes every entry of f onto the extended path that starts at the
// transformed instance's fixed departure time (waiting prefix prepended).
flow extend_flow_to_fdt(const instance& original, const instance& transformed, const flow& f);

}  // namespace teq

#endif
