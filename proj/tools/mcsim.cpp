// Command-line driver for the crowdsensing market simulator: scenario
// generation, single mechanism runs, parameter sweeps, convergence CDFs and
// stability checks over serialized outcomes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcs/harness.hpp"
#include "mcs/instance.hpp"
#include "mcs/ocf.hpp"
#include "mcs/optimizers.hpp"
#include "mcs/outcome.hpp"

namespace {

using nlohmann::json;

mcs::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return mcs::parse_config(json::object());
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return mcs::parse_config(j);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

mcs::Instance instance_from_args(const mcs::ExperimentConfig& cfg,
                                 const std::string& scenario_path,
                                 std::optional<std::uint64_t> seed) {
  if (!scenario_path.empty()) {
    std::ifstream in(scenario_path);
    if (!in) throw std::runtime_error("cannot open scenario: " + scenario_path);
    json j;
    in >> j;
    return mcs::make_instance(j.get<mcs::Scenario>());
  }
  mcs::GlobalParams p = cfg.params;
  if (seed) p.rng_seed = *seed;
  return mcs::make_instance(p, cfg.n_tasks, cfg.n_users);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"crowdsensing market simulator"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file")
      ->envname("MCSIM_CONFIG");

  // generate
  auto* gen = app.add_subcommand("generate", "emit a scenario JSON");
  std::uint64_t gen_seed = 1;
  int gen_tasks = 0, gen_users = 0;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "scenario seed");
  gen->add_option("--tasks", gen_tasks, "number of tasks");
  gen->add_option("--users", gen_users, "number of users");
  gen->add_option("-o,--output", gen_out, "output path (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "run one mechanism on one instance");
  std::string run_mode = "ocf-random";
  std::uint64_t run_seed = 1;
  double run_alpha = -1.0;
  std::string run_scenario, run_out, run_trace;
  run->add_option("--mode", run_mode,
                  "centralized | noncoop | ocf-random | ocf-priority");
  run->add_option("--seed", run_seed, "scenario seed");
  run->add_option("--alpha", run_alpha, "incentive intensity");
  run->add_option("--scenario", run_scenario, "run on a stored scenario");
  run->add_option("-o,--output", run_out, "outcome path (default stdout)");
  run->add_option("--trace", run_trace, "write per-operation NDJSON trace");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo parameter sweep");
  std::string sweep_var;
  double grid_min = 0.0, grid_max = 0.0, grid_step = 0.0;
  int sweep_instances = 0;
  std::string sweep_out_dir;
  std::uint64_t sweep_seed_base = 0;
  bool sweep_full = false;
  sweep->add_option("--var", sweep_var, "alpha1 | alpha2 | users | tasks");
  sweep->add_option("--grid-min", grid_min, "grid lower bound");
  sweep->add_option("--grid-max", grid_max, "grid upper bound");
  sweep->add_option("--grid-step", grid_step, "grid step");
  sweep->add_option("--instances", sweep_instances, "instances per point");
  sweep->add_flag("--full", sweep_full, "use 1000 instances per point");
  sweep->add_option("--out-dir", sweep_out_dir, "output directory");
  sweep->add_option("--seed-base", sweep_seed_base, "seed base");

  // cdf-iterations
  auto* cdf = app.add_subcommand("cdf-iterations",
                                 "empirical CDF of iterations to converge");
  std::vector<int> cdf_users;
  int cdf_instances = 0;
  std::string cdf_out_dir;
  cdf->add_option("--users", cdf_users, "user counts, e.g. --users 20 50");
  cdf->add_option("--instances", cdf_instances, "instances per user count");
  cdf->add_option("--out-dir", cdf_out_dir, "output directory");

  // stability-check
  auto* stab = app.add_subcommand("stability-check",
                                  "verify a stored cooperative outcome");
  std::string stab_outcome, stab_scenario;
  stab->add_option("outcome", stab_outcome, "outcome JSON")->required();
  stab->add_option("--scenario", stab_scenario, "scenario JSON override");

  CLI11_PARSE(app, argc, argv);

  mcs::ExperimentConfig cfg = load_config(config_path);

  if (gen->parsed()) {
    mcs::GlobalParams p = cfg.params;
    p.rng_seed = gen_seed;
    int n_tasks = gen_tasks > 0 ? gen_tasks : cfg.n_tasks;
    int n_users = gen_users > 0 ? gen_users : cfg.n_users;
    mcs::Scenario s = mcs::generate_scenario(p, n_tasks, n_users);
    write_text(gen_out, json(s).dump(2) + "\n");
    return 0;
  }

  if (run->parsed()) {
    mcs::Mode mode = mcs::mode_from_string(run_mode);
    mcs::Instance inst = instance_from_args(cfg, run_scenario, run_seed);
    double alpha = run_alpha;
    if (alpha < 0.0) {
      alpha = mode == mcs::Mode::noncoop ? inst.params().incentive_alpha1
                                         : inst.params().incentive_alpha2;
    }
    std::vector<mcs::TraceEvent> trace;
    mcs::OcfOptions ocf_opt = cfg.ocf;
    if (!run_trace.empty()) ocf_opt.trace = &trace;

    mcs::MechanismOutcome out =
        mcs::run_single(mode, inst, alpha, cfg.solver, ocf_opt);
    out.config_hash = mcs::config_hash(cfg);
    write_text(run_out, json(out).dump(2) + "\n");
    if (!run_trace.empty()) {
      std::string nd;
      for (const auto& e : trace) nd += json(e).dump() + "\n";
      write_text(run_trace, nd);
    }
    return 0;
  }

  if (sweep->parsed()) {
    if (!sweep_var.empty()) cfg.var = sweep_var;
    if (grid_step > 0.0) cfg.grid = mcs::linear_grid(grid_min, grid_max, grid_step);
    if (cfg.grid.empty() || !sweep_var.empty()) {
      if (!(grid_step > 0.0)) cfg.grid = mcs::default_grid(cfg.var);
    }
    if (sweep_instances > 0) cfg.instances_per_point = sweep_instances;
    if (sweep_full) cfg.instances_per_point = 1000;
    if (!sweep_out_dir.empty()) cfg.output_dir = sweep_out_dir;
    if (sweep_seed_base != 0) cfg.seed_base = sweep_seed_base;
    mcs::validate(cfg);

    mcs::SweepResult result = (cfg.var == "alpha1" || cfg.var == "alpha2")
                              ? mcs::sweep_alpha(cfg)
                              : mcs::sweep_population(cfg);
    auto path = mcs::write_sweep_csv(result, cfg);
    std::cout << path.string() << "\n";
    return 0;
  }

  if (cdf->parsed()) {
    if (!cdf_users.empty()) {
      cfg.grid.clear();
      for (int u : cdf_users) cfg.grid.push_back(u);
    } else if (cfg.var != "users") {
      cfg.grid = {20, 50};
    }
    cfg.var = "users";
    if (cdf_instances > 0) cfg.instances_per_point = cdf_instances;
    if (!cdf_out_dir.empty()) cfg.output_dir = cdf_out_dir;
    mcs::validate(cfg);
    auto cdfs = mcs::iteration_cdf(cfg);
    auto path = mcs::write_cdf_csv(cdfs, cfg);
    std::cout << path.string() << "\n";
    return 0;
  }

  if (stab->parsed()) {
    std::ifstream in(stab_outcome);
    if (!in) throw std::runtime_error("cannot open outcome: " + stab_outcome);
    json j;
    in >> j;
    mcs::MechanismOutcome out = mcs::outcome_from_json(j);

    mcs::Instance inst;
    if (!stab_scenario.empty()) {
      inst = instance_from_args(cfg, stab_scenario, std::nullopt);
    } else {
      mcs::GlobalParams p = out.params;
      p.rng_seed = out.seed;
      inst = mcs::make_instance(p, out.n_tasks, out.n_users);
    }

    json report;
    report["mode"] = mcs::to_string(out.mode);
    report["seed"] = out.seed;

    // Subcarrier exclusivity holds by construction of the owner encoding;
    // re-check the rate constraint for every user.
    auto feasible = mcs::check_rate_feasible(inst.caps, out.assignment,
                                             out.participation,
                                             inst.tasks());
    bool rate_ok = std::all_of(feasible.begin(), feasible.end(),
                               [](bool b) { return b; });
    report["rate_feasible"] = rate_ok;

    bool ok = rate_ok;
    if (out.mode == mcs::Mode::ocf_random ||
        out.mode == mcs::Mode::ocf_priority) {
      mcs::CoalitionState st = mcs::state_from_outcome(inst, out);
      auto counterexample = mcs::find_instability(st, inst, out.alpha);
      report["t_stable"] = !counterexample.has_value();
      if (counterexample) {
        report["counterexample"] = counterexample->describe();
        ok = false;
      }
    }
    report["ok"] = ok;
    std::cout << report.dump(2) << "\n";
    return ok ? 0 : 3;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
