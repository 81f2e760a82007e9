#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "teq/instances.hpp"
#include "teq/pos.hpp"
#include "teq/solver_exact.hpp"
#include "teq/solver_heuristic.hpp"
#include "teq/solver_single.hpp"
#include "teq/sysopt.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_no_equilibrium = 2;
constexpr int exit_resource_limit = 3;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void print_verdict(const std::string& outcome, const teq::metrics_report& report,
                   std::uint64_t seed) {
  std::cout << "VERDICT outcome=" << outcome << " mean_rho=" << teq::to_string(report.mean_rho)
            << " p99_rho=" << (report.p99_rho ? teq::to_string(*report.p99_rho) : "inf")
            << " s_r0=" << teq::to_string(report.share_zero_regret)
            << " social_cost=" << teq::to_string(report.social) << " seed=" << seed << "\n";
}

struct cli_state {
  std::string instance_path;
  std::string flow_path;
  std::string out_path;
  std::string metrics_path;
  std::string trace_path;
};

teq::instance load_instance(const std::string& path) {
  return teq::materialize(teq::parse_instance_file(read_input(path)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"side-constrained transit equilibria: solvers, verifiers, generators"};
  app.require_subcommand(1);
  cli_state st;

  auto* build = app.add_subcommand("build", "build the time-expanded graph and print stats");
  build->add_option("-i,--instance", st.instance_path, "instance file (- for stdin)")
      ->required();

  auto* solve = app.add_subcommand("solve", "compute a flow");
  std::string method = "exact";
  teq::heuristic_config hconfig;
  teq::exact_limits limits;
  int jobs = 1;
  bool no_prefill = false, no_warm_start = false, forbid_outside = false, no_compress = false;
  std::string selection = "max-regret";
  solve->add_option("-i,--instance", st.instance_path, "instance file (- for stdin)")
      ->required();
  solve->add_option("--method", method, "single|exact|heuristic|sysopt")
      ->check(CLI::IsMember({"single", "exact", "heuristic", "sysopt"}));
  solve->add_option("-o,--out", st.out_path, "flow output file");
  solve->add_option("--metrics", st.metrics_path, "metrics csv output");
  solve->add_option("--trace", st.trace_path, "heuristic trace csv output");
  solve->add_option("--budget-secs", hconfig.budget_secs, "heuristic time budget");
  solve->add_option("--iter-cap", hconfig.iter_cap, "heuristic iteration cap");
  solve->add_option("--seed", hconfig.seed, "random seed");
  solve->add_option("--selection", selection, "max-regret|random")
      ->check(CLI::IsMember({"max-regret", "random"}));
  solve->add_option("--cycle-window", hconfig.cycle_window, "cycle detection window (0 off)");
  solve->add_option("--restarts", hconfig.restart_limit, "restart limit");
  solve->add_flag("--no-prefill", no_prefill, "skip the fixed initial solution");
  solve->add_flag("--no-warm-start", no_warm_start, "skip the social-cost warm start");
  solve->add_flag("--no-compress", no_compress, "alias for --cycle-window 0");
  solve->add_option("--limit-edges", limits.max_saturated_candidates,
                    "exact solver candidate-edge limit");
  solve->add_option("--path-cap", limits.path_cap, "strategy enumeration cap");
  solve->add_flag("--forbid-outside", forbid_outside,
                  "exact solver: require equilibria without outside options");
  solve->add_option("--jobs", jobs, "worker pool bound");

  auto* verify = app.add_subcommand("verify", "re-check a flow against an instance");
  verify->add_option("-i,--instance", st.instance_path, "instance file")->required();
  verify->add_option("-f,--flow", st.flow_path, "flow file")->required();

  auto* metrics_cmd = app.add_subcommand("metrics", "regret metrics of a flow");
  metrics_cmd->add_option("-i,--instance", st.instance_path, "instance file")->required();
  metrics_cmd->add_option("-f,--flow", st.flow_path, "flow file")->required();
  metrics_cmd->add_option("-o,--out", st.out_path, "metrics csv output");

  auto* gen = app.add_subcommand("gen", "generate instances");
  std::string example, sat_path, sat_mode_name = "dtc";
  std::string epsilon = "1/64", delta = "0";
  gen->add_option("--example", example, "fig1|fig4|fig6|fig7|fig9|fig10");
  gen->add_option("--sat", sat_path, "dimacs cnf file");
  gen->add_option("--mode", sat_mode_name, "dtc|fixed")->check(CLI::IsMember({"dtc", "fixed"}));
  gen->add_option("--epsilon", epsilon, "fig9 epsilon (rational in (0,1))");
  gen->add_option("--delta", delta, "fig7 red-arrival delay in cost units");
  gen->add_option("-o,--out", st.out_path, "output file");

  auto* unroll = app.add_subcommand("unroll", "expand periodic trips over the horizon");
  unroll->add_option("-i,--instance", st.instance_path, "periodic instance file")->required();
  unroll->add_option("-o,--out", st.out_path, "output file");

  auto* pos_cmd = app.add_subcommand("pos", "price of stability");
  pos_cmd->add_option("-i,--instance", st.instance_path, "instance file")->required();
  pos_cmd->add_option("--limit-edges", limits.max_saturated_candidates,
                      "exact solver candidate-edge limit");
  pos_cmd->add_option("--path-cap", limits.path_cap, "strategy enumeration cap");
  pos_cmd->add_option("--jobs", jobs, "worker pool bound");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      auto inst = load_instance(st.instance_path);
      const auto& g = inst.graph;
      std::size_t counts_nodes[3] = {0, 0, 0}, counts_edges[5] = {0, 0, 0, 0, 0};
      for (const auto& n : g.nodes) ++counts_nodes[static_cast<int>(n.kind)];
      for (const auto& e : g.edges) ++counts_edges[static_cast<int>(e.kind)];
      std::cout << "stations=" << g.station_ids.size() << " trips=" << g.trip_ids.size()
                << " nodes=" << g.num_nodes() << " edges=" << g.num_edges()
                << " commodities=" << inst.commodities.size() << "\n"
                << "on_platform=" << counts_nodes[1] << " departure=" << counts_nodes[2]
                << " arrival=" << counts_nodes[0] << "\n"
                << "waiting=" << counts_edges[1] << " boarding=" << counts_edges[4]
                << " driving=" << counts_edges[2] << " alighting=" << counts_edges[3]
                << " dwelling=" << counts_edges[0] << "\n";
      return exit_ok;
    }

    if (solve->parsed()) {
      auto inst = load_instance(st.instance_path);
      limits.jobs = jobs;
      hconfig.prefill = !no_prefill;
      hconfig.use_warm_start = !no_warm_start;
      if (no_compress) hconfig.cycle_window = 0;
      hconfig.selection = selection == "random"
                              ? teq::heuristic_config::selection_rule::random
                              : teq::heuristic_config::selection_rule::max_regret;
      std::optional<teq::flow> result;
      std::string outcome = "equilibrium";
      if (method == "single") {
        result = teq::solve_single(inst);
      } else if (method == "sysopt") {
        result = teq::solve_system_optimum(inst);
        outcome = "best-effort";
      } else if (method == "exact") {
        limits.forbid_outside = forbid_outside;
        auto res = teq::solve_exact(inst, limits);
        if (res.outcome == teq::exact_outcome::resource_limit) {
          std::cout << "VERDICT outcome=resource-limit reason=\"" << res.limit_reason << "\"\n";
          return exit_resource_limit;
        }
        if (res.outcome == teq::exact_outcome::no_equilibrium) {
          std::cout << "VERDICT outcome=no-equilibrium subsets=" << res.subsets_tested << "\n";
          return exit_no_equilibrium;
        }
        result = std::move(res.solution);
      } else {
        auto res = teq::solve_heuristic(inst, hconfig);
        result = res.best;
        outcome = res.equilibrium ? "equilibrium" : "best-effort";
        if (!st.trace_path.empty()) write_output(st.trace_path, teq::trace_to_csv(res.trace));
      }
      auto report = teq::metrics(*result);
      if (method == "single" || method == "exact")
        outcome = teq::verify_equilibrium(*result).ok() ? "equilibrium" : "best-effort";
      if (outcome == "best-effort" && report.share_zero_regret == 1) outcome = "equilibrium";
      if (!st.out_path.empty()) write_output(st.out_path, teq::serialize_flow(*result));
      if (!st.metrics_path.empty()) write_output(st.metrics_path, teq::metrics_to_csv(report));
      print_verdict(outcome, report, hconfig.seed);
      return exit_ok;
    }

    if (verify->parsed()) {
      auto inst = load_instance(st.instance_path);
      auto f = teq::parse_flow(inst, read_input(st.flow_path));
      auto res = teq::verify_equilibrium(f);
      bool qvi = teq::verify_qvi(f);
      bool bs = teq::verify_bs(f);
      auto report = teq::metrics(f);
      std::string outcome = res.ok() ? "equilibrium" : "best-effort";
      if (res.outcome == teq::verify_result::status::infeasible) outcome = "infeasible";
      std::cout << "definition=" << (res.ok() ? "pass" : "fail") << " qvi="
                << (qvi ? "pass" : "fail") << " bs=" << (bs ? "pass" : "fail");
      if (res.first)
        std::cout << " violations=" << res.violation_count << " first_commodity="
                  << inst.commodities[res.first->commodity].id;
      std::cout << "\n";
      print_verdict(outcome, report, 0);
      return exit_ok;
    }

    if (metrics_cmd->parsed()) {
      auto inst = load_instance(st.instance_path);
      auto f = teq::parse_flow(inst, read_input(st.flow_path));
      auto report = teq::metrics(f);
      write_output(st.out_path, teq::metrics_to_csv(report));
      return exit_ok;
    }

    if (gen->parsed()) {
      teq::instance_file file;
      if (!example.empty()) {
        teq::example_params params;
        params.epsilon = teq::parse_rational(epsilon);
        params.delta = teq::parse_rational(delta);
        file = teq::gen_example(example, params);
      } else if (!sat_path.empty()) {
        auto formula = teq::parse_dimacs(read_input(sat_path));
        file = teq::gen_sat(formula, sat_mode_name == "fixed" ? teq::sat_mode::fixed
                                                              : teq::sat_mode::dtc);
      } else {
        std::cerr << "gen needs --example or --sat\n";
        return exit_error;
      }
      write_output(st.out_path, teq::serialize_instance_file(file));
      return exit_ok;
    }

    if (unroll->parsed()) {
      auto file = teq::parse_instance_file(read_input(st.instance_path));
      if (!file.period) throw std::runtime_error("instance has no period");
      file.trips = teq::unroll_periodic(file.trips, *file.period, file.horizon->first,
                                        file.horizon->second);
      file.period.reset();
      write_output(st.out_path, teq::serialize_instance_file(file));
      return exit_ok;
    }

    if (pos_cmd->parsed()) {
      auto inst = load_instance(st.instance_path);
      limits.jobs = jobs;
      auto res = teq::price_of_stability(inst, limits);
      if (res.equilibria.resource_limit) {
        std::cout << "POS outcome=resource-limit reason=\"" << res.equilibria.limit_reason
                  << "\"\n";
        return exit_resource_limit;
      }
      if (!res.value) {
        std::cout << "POS outcome=no-equilibrium sysopt=" << teq::to_string(res.sysopt_cost)
                  << "\n";
        return exit_no_equilibrium;
      }
      std::cout << "POS value=" << teq::to_string(*res.value)
                << " best_equilibrium=" << teq::to_string(res.equilibria.min_cost)
                << " worst_equilibrium=" << teq::to_string(res.equilibria.max_cost)
                << " sysopt=" << teq::to_string(res.sysopt_cost) << "\n";
      return exit_ok;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }
  return exit_error;
}
