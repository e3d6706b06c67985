#ifndef MCS_HARNESS_HPP
#define MCS_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcs/instance.hpp"
#include "mcs/ocf.hpp"
#include "mcs/optimizers.hpp"
#include "mcs/outcome.hpp"
#include "mcs/rng.hpp"

namespace mcs {

// Seed streams: keep scenario generation, subcarrier lotteries and leader
// restarts on disjoint substreams of one base seed.
inline constexpr std::uint64_t kStreamAssignment = 7;

struct ExperimentConfig {
  GlobalParams params;
  int n_tasks = 25;
  int n_users = 60;
  std::vector<Mode> modes = {Mode::centralized, Mode::noncoop,
                             Mode::ocf_random, Mode::ocf_priority};
  std::string var = "alpha2";  // alpha1 | alpha2 | users | tasks
  std::vector<double> grid;
  std::vector<double> alpha_grid;  // nested search grid for population sweeps
  int instances_per_point = 100;
  int search_instances = 30;
  std::uint64_t seed_base = 1;
  std::string output_dir = "out";
  SolverOptions solver;
  OcfOptions ocf;
};

inline std::vector<double> linear_grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0;; ++i) {
    double v = lo + i * step;
    if (v > hi + 1e-12) break;
    g.push_back(v);
  }
  return g;
}

inline std::vector<double> default_grid(const std::string& var) {
  if (var == "alpha1" || var == "alpha2") return linear_grid(0.0, 2.0, 0.1);
  if (var == "users") return linear_grid(20, 100, 10);
  if (var == "tasks") return linear_grid(10, 40, 5);
  throw std::invalid_argument("unknown sweep variable: " + var);
}

inline void validate(const ExperimentConfig& c) {
  validate(c.params);
  if (c.n_tasks < 1 || c.n_users < 1) {
    throw std::invalid_argument("n_tasks and n_users must be >= 1");
  }
  if (c.modes.empty()) throw std::invalid_argument("mode set is empty");
  if (c.instances_per_point < 1 || c.search_instances < 1) {
    throw std::invalid_argument("instance counts must be >= 1");
  }
  auto check_grid = [](const std::vector<double>& g, const char* name) {
    if (g.empty()) throw std::invalid_argument(std::string(name) + " empty");
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (!(g[i] > g[i - 1])) {
        throw std::invalid_argument(std::string(name) +
                                    " must be strictly increasing");
      }
    }
  };
  check_grid(c.grid, "grid");
  check_grid(c.alpha_grid, "alpha_grid");
}

// Flat JSON config; keys mirror the parameter and experiment field names.
// Absent keys keep their defaults.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("side_length", c.params.side_length);
  get("n_subcarriers", c.params.n_subcarriers);
  get("bandwidth", c.params.bandwidth);
  get("tx_power", c.params.tx_power);
  get("noise_variance", c.params.noise_variance);
  get("path_loss_exponent", c.params.path_loss_exponent);
  get("contribution_exponent", c.params.contribution_exponent);
  get("rate_charge_scale", c.params.rate_charge_scale);
  get("revenue_split", c.params.revenue_split);
  get("incentive_alpha1", c.params.incentive_alpha1);
  get("incentive_alpha2", c.params.incentive_alpha2);
  get("rate_unit", c.params.rate_unit);
  get("rng_seed", c.params.rng_seed);
  get("n_tasks", c.n_tasks);
  get("n_users", c.n_users);
  get("var", c.var);
  get("instances_per_point", c.instances_per_point);
  get("search_instances", c.search_instances);
  get("seed_base", c.seed_base);
  get("output_dir", c.output_dir);
  get("leader_restarts", c.solver.leader_restarts);
  get("ocf_sweep_cap", c.ocf.sweep_cap);
  if (j.contains("follower_policy")) {
    c.solver.follower_policy =
        follower_policy_from_string(j.at("follower_policy").get<std::string>());
  }
  if (j.contains("leader_prediction")) {
    c.solver.leader_prediction = follower_policy_from_string(
        j.at("leader_prediction").get<std::string>());
  }
  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& s : j.at("modes")) {
      c.modes.push_back(mode_from_string(s.get<std::string>()));
    }
  }
  if (j.contains("grid")) {
    c.grid = j.at("grid").get<std::vector<double>>();
  } else if (j.contains("grid_min")) {
    c.grid = linear_grid(j.at("grid_min").get<double>(),
                         j.at("grid_max").get<double>(),
                         j.at("grid_step").get<double>());
  }
  if (j.contains("alpha_grid")) {
    c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  }
  if (c.grid.empty()) c.grid = default_grid(c.var);
  if (c.alpha_grid.empty()) c.alpha_grid = linear_grid(0.1, 2.0, 0.1);
  validate(c);
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["side_length"] = c.params.side_length;
  j["n_subcarriers"] = c.params.n_subcarriers;
  j["bandwidth"] = c.params.bandwidth;
  j["tx_power"] = c.params.tx_power;
  j["noise_variance"] = c.params.noise_variance;
  j["path_loss_exponent"] = c.params.path_loss_exponent;
  j["contribution_exponent"] = c.params.contribution_exponent;
  j["rate_charge_scale"] = c.params.rate_charge_scale;
  j["revenue_split"] = c.params.revenue_split;
  j["rate_unit"] = c.params.rate_unit;
  j["n_tasks"] = c.n_tasks;
  j["n_users"] = c.n_users;
  j["var"] = c.var;
  j["grid"] = c.grid;
  j["alpha_grid"] = c.alpha_grid;
  j["instances_per_point"] = c.instances_per_point;
  j["search_instances"] = c.search_instances;
  j["seed_base"] = c.seed_base;
  nlohmann::json modes = nlohmann::json::array();
  for (Mode m : c.modes) modes.push_back(to_string(m));
  j["modes"] = modes;
  j["follower_policy"] = to_string(c.solver.follower_policy);
  j["leader_prediction"] = to_string(c.solver.leader_prediction);
  j["leader_restarts"] = c.solver.leader_restarts;
  j["ocf_sweep_cap"] = c.ocf.sweep_cap;
  return j;
}

inline std::uint64_t config_hash(const ExperimentConfig& c) {
  std::string dump = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Dispatch one mechanism on one instance. `alpha` is alpha1 for the
// non-cooperative mechanism and alpha2 for the cooperative ones; ignored by
// the centralized bound.
inline MechanismOutcome run_single(Mode mode, const Instance& inst,
                                   double alpha,
                                   const SolverOptions& solver = {},
                                   const OcfOptions& ocf = {}) {
  switch (mode) {
    case Mode::centralized:
      return run_centralized(inst, solver);
    case Mode::noncoop:
      return run_noncooperative(inst, alpha, solver);
    case Mode::ocf_random: {
      Rng rng(derive_seed(inst.params().rng_seed, kStreamAssignment));
      SubcarrierAssignment assign = allocate_random(inst.scenario, rng);
      return run_ocf(inst, assign, alpha, mode, ocf).first;
    }
    case Mode::ocf_priority: {
      SubcarrierAssignment assign =
          allocate_priority(inst.scenario, inst.caps, inst.q);
      return run_ocf(inst, assign, alpha, mode, ocf).first;
    }
  }
  throw std::logic_error("bad mode");
}

struct Stat {
  long n = 0;
  double mean = 0.0;
  double se = 0.0;
};

inline Stat summarize(const std::vector<double>& xs) {
  Stat s;
  s.n = static_cast<long>(xs.size());
  if (s.n == 0) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / (s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

struct ModePointStats {
  Stat platform_utility;
  Stat pfm;
  Stat user_utility_sum;
  Stat iterations;
  double best_alpha = 0.0;  // set by population sweeps
};

struct SweepPoint {
  double grid_value = 0.0;
  std::uint64_t point_seed = 0;
  std::map<Mode, ModePointStats> stats;
};

struct SweepResult {
  std::string var;
  std::vector<SweepPoint> points;
  std::map<Mode, double> best_alpha;  // argmax of mean platform utility
};

namespace detail {

struct Accumulator {
  std::vector<double> platform_utility, pfm, user_utility_sum, iterations;

  void add(const MechanismOutcome& o) {
    platform_utility.push_back(o.report.platform_utility);
    pfm.push_back(o.report.pfm);
    user_utility_sum.push_back(o.report.user_utility_sum());
    iterations.push_back(static_cast<double>(
        o.mode == Mode::ocf_random || o.mode == Mode::ocf_priority
            ? o.ocf.iterations_to_converge
            : o.solver.iterations));
  }

  ModePointStats stats() const {
    ModePointStats s;
    s.platform_utility = summarize(platform_utility);
    s.pfm = summarize(pfm);
    s.user_utility_sum = summarize(user_utility_sum);
    s.iterations = summarize(iterations);
    return s;
  }
};

inline Instance instance_for(const ExperimentConfig& c, int n_tasks,
                             int n_users, std::uint64_t seed) {
  GlobalParams p = c.params;
  p.rng_seed = seed;
  return make_instance(p, n_tasks, n_users);
}

inline bool mode_uses_alpha1(Mode m) { return m == Mode::noncoop; }
inline bool mode_uses_alpha2(Mode m) {
  return m == Mode::ocf_random || m == Mode::ocf_priority;
}

}  // namespace detail

// Mean platform utility per grid point for the incentive-intensity sweep;
// applies to the mechanism family matching `var` (alpha1 -> non-cooperative,
// alpha2 -> cooperative).
inline SweepResult sweep_alpha(const ExperimentConfig& c) {
  validate(c);
  if (c.var != "alpha1" && c.var != "alpha2") {
    throw std::invalid_argument("sweep_alpha needs var alpha1 or alpha2");
  }
  std::vector<Mode> modes;
  for (Mode m : c.modes) {
    if ((c.var == "alpha1" && detail::mode_uses_alpha1(m)) ||
        (c.var == "alpha2" && detail::mode_uses_alpha2(m))) {
      modes.push_back(m);
    }
  }
  if (modes.empty()) {
    throw std::invalid_argument("no mode in the config matches " + c.var);
  }

  SweepResult result;
  result.var = c.var;
  for (std::size_t pt = 0; pt < c.grid.size(); ++pt) {
    SweepPoint point;
    point.grid_value = c.grid[pt];
    point.point_seed = derive_seed(c.seed_base, pt);
    std::map<Mode, detail::Accumulator> acc;
    for (int it = 0; it < c.instances_per_point; ++it) {
      std::uint64_t seed = derive_seed(c.seed_base, pt, it);
      Instance inst = detail::instance_for(c, c.n_tasks, c.n_users, seed);
      for (Mode m : modes) {
        acc[m].add(run_single(m, inst, c.grid[pt], c.solver, c.ocf));
      }
    }
    for (Mode m : modes) point.stats[m] = acc[m].stats();
    result.points.push_back(std::move(point));
  }
  for (Mode m : modes) {
    double best_u = -std::numeric_limits<double>::infinity();
    double best_a = c.grid.front();
    for (const SweepPoint& p : result.points) {
      double u = p.stats.at(m).platform_utility.mean;
      if (u > best_u) {
        best_u = u;
        best_a = p.grid_value;
      }
    }
    result.best_alpha[m] = best_a;
  }
  return result;
}

namespace detail {

// Pick the alpha with the highest mean platform utility over
// `search_instances` instances. The same instances score every candidate
// (common random numbers), which makes the argmax far less noisy than fresh
// draws per candidate; a halved-step refinement pass around the coarse
// winner follows. Seeds stay disjoint from the evaluation instances.
inline double search_best_alpha(const ExperimentConfig& c, Mode mode,
                                int n_tasks, int n_users, std::size_t pt) {
  std::vector<Instance> instances;
  instances.reserve(c.search_instances);
  for (int it = 0; it < c.search_instances; ++it) {
    std::uint64_t seed =
        derive_seed(c.seed_base ^ 0x5eedab1e5eedab1eull, pt, it);
    instances.push_back(instance_for(c, n_tasks, n_users, seed));
  }
  auto score = [&](double alpha) {
    double total = 0.0;
    for (const Instance& inst : instances) {
      total += run_single(mode, inst, alpha, c.solver, c.ocf)
                   .report.platform_utility;
    }
    return total / c.search_instances;
  };

  double best_u = -std::numeric_limits<double>::infinity();
  double best_a = c.alpha_grid.front();
  for (double a : c.alpha_grid) {
    double u = score(a);
    if (u > best_u) {
      best_u = u;
      best_a = a;
    }
  }
  if (c.alpha_grid.size() > 1) {
    double step = (c.alpha_grid.back() - c.alpha_grid.front()) /
                  static_cast<double>(c.alpha_grid.size() - 1);
    for (double a : {best_a - step / 2.0, best_a + step / 2.0}) {
      if (a <= 0.0) continue;
      double u = score(a);
      if (u > best_u) {
        best_u = u;
        best_a = a;
      }
    }
  }
  return best_a;
}

}  // namespace detail

// Population sweep over the number of users or tasks. Each mechanism first
// gets its incentive intensity tuned on the nested alpha grid, then is
// evaluated at that setting.
inline SweepResult sweep_population(const ExperimentConfig& c) {
  validate(c);
  if (c.var != "users" && c.var != "tasks") {
    throw std::invalid_argument("sweep_population needs var users or tasks");
  }

  SweepResult result;
  result.var = c.var;
  for (std::size_t pt = 0; pt < c.grid.size(); ++pt) {
    int n_users = c.var == "users" ? static_cast<int>(c.grid[pt]) : c.n_users;
    int n_tasks = c.var == "tasks" ? static_cast<int>(c.grid[pt]) : c.n_tasks;

    SweepPoint point;
    point.grid_value = c.grid[pt];
    point.point_seed = derive_seed(c.seed_base, pt);

    std::map<Mode, double> alpha;
    for (Mode m : c.modes) {
      alpha[m] = (m == Mode::centralized)
                     ? 0.0
                     : detail::search_best_alpha(c, m, n_tasks, n_users, pt);
    }
    std::map<Mode, detail::Accumulator> acc;
    for (int it = 0; it < c.instances_per_point; ++it) {
      std::uint64_t seed = derive_seed(c.seed_base, pt, it);
      Instance inst = detail::instance_for(c, n_tasks, n_users, seed);
      for (Mode m : c.modes) {
        acc[m].add(run_single(m, inst, alpha[m], c.solver, c.ocf));
      }
    }
    for (Mode m : c.modes) {
      point.stats[m] = acc[m].stats();
      point.stats[m].best_alpha = alpha[m];
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

struct CdfPoint {
  double value = 0.0;
  double cumulative_probability = 0.0;
};

struct IterationCdf {
  int n_users = 0;
  std::vector<CdfPoint> cdf;
  double p99 = 0.0;
};

// Empirical distribution of iterations-to-converge for each user count in
// the grid, using the first cooperative mode in the config.
inline std::vector<IterationCdf> iteration_cdf(const ExperimentConfig& c) {
  validate(c);
  Mode mode = Mode::ocf_random;
  for (Mode m : c.modes) {
    if (detail::mode_uses_alpha2(m)) {
      mode = m;
      break;
    }
  }
  std::vector<IterationCdf> out;
  for (std::size_t pt = 0; pt < c.grid.size(); ++pt) {
    int n_users = static_cast<int>(c.grid[pt]);
    std::vector<double> samples;
    for (int it = 0; it < c.instances_per_point; ++it) {
      std::uint64_t seed = derive_seed(c.seed_base, pt, it);
      Instance inst = detail::instance_for(c, c.n_tasks, n_users, seed);
      auto outcome =
          run_single(mode, inst, c.params.incentive_alpha2, c.solver, c.ocf);
      samples.push_back(
          static_cast<double>(outcome.ocf.iterations_to_converge));
    }
    std::sort(samples.begin(), samples.end());
    IterationCdf entry;
    entry.n_users = n_users;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
      entry.cdf.push_back({samples[i], (i + 1) / n});
    }
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(0.99 * samples.size())) - 1;
    entry.p99 = samples[std::min(idx, samples.size() - 1)];
    out.push_back(std::move(entry));
  }
  return out;
}

// --- CSV / metadata emission -------------------------------------------------

#ifndef MCS_GIT_DESCRIBE
#define MCS_GIT_DESCRIBE "unknown"
#endif

inline std::string format_number(double v) {
  return nlohmann::json(v).dump();
}

inline void write_metadata(const std::filesystem::path& csv_path,
                           const ExperimentConfig& c,
                           const nlohmann::json& extra = {}) {
  nlohmann::json meta{{"config", config_to_json(c)},
                      {"git_describe", MCS_GIT_DESCRIBE},
                      {"seed_base", c.seed_base}};
  if (!extra.is_null()) meta["result"] = extra;
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.json");
  std::ofstream out(p);
  out << meta.dump(2) << "\n";
}

inline std::filesystem::path write_sweep_csv(const SweepResult& r,
                                             const ExperimentConfig& c) {
  std::filesystem::create_directories(c.output_dir);
  std::filesystem::path path =
      std::filesystem::path(c.output_dir) / ("sweep_" + r.var + ".csv");
  std::ofstream out(path);

  std::vector<Mode> modes;
  for (const auto& [m, _] : r.points.front().stats) modes.push_back(m);

  out << r.var << ",point_seed";
  for (Mode m : modes) {
    std::string tag = to_string(m);
    out << "," << tag << "_best_alpha"
        << "," << tag << "_platform_utility_mean"
        << "," << tag << "_platform_utility_se"
        << "," << tag << "_pfm_mean"
        << "," << tag << "_pfm_se"
        << "," << tag << "_user_utility_sum_mean"
        << "," << tag << "_user_utility_sum_se"
        << "," << tag << "_iterations_mean"
        << "," << tag << "_iterations_se";
  }
  out << "\n";
  for (const SweepPoint& p : r.points) {
    out << format_number(p.grid_value) << "," << p.point_seed;
    for (Mode m : modes) {
      const ModePointStats& s = p.stats.at(m);
      double best = s.best_alpha;
      if (auto it = r.best_alpha.find(m); it != r.best_alpha.end()) {
        best = it->second;
      }
      out << "," << format_number(best) << ","
          << format_number(s.platform_utility.mean) << ","
          << format_number(s.platform_utility.se) << ","
          << format_number(s.pfm.mean) << "," << format_number(s.pfm.se) << ","
          << format_number(s.user_utility_sum.mean) << ","
          << format_number(s.user_utility_sum.se) << ","
          << format_number(s.iterations.mean) << ","
          << format_number(s.iterations.se);
    }
    out << "\n";
  }

  nlohmann::json extra;
  for (const auto& [m, a] : r.best_alpha) extra[to_string(m)] = a;
  write_metadata(path, c, nlohmann::json{{"best_alpha", extra}});
  return path;
}

inline std::filesystem::path write_cdf_csv(const std::vector<IterationCdf>& cdfs,
                                           const ExperimentConfig& c) {
  std::filesystem::create_directories(c.output_dir);
  std::filesystem::path path =
      std::filesystem::path(c.output_dir) / "iteration_cdf.csv";
  std::ofstream out(path);
  out << "n_users,iterations,cumulative_probability\n";
  for (const IterationCdf& e : cdfs) {
    for (const CdfPoint& p : e.cdf) {
      out << e.n_users << "," << format_number(p.value) << ","
          << format_number(p.cumulative_probability) << "\n";
    }
  }
  nlohmann::json extra = nlohmann::json::array();
  for (const IterationCdf& e : cdfs) {
    extra.push_back({{"n_users", e.n_users}, {"p99_iterations", e.p99}});
  }
  write_metadata(path, c, extra);
  return path;
}

}  // namespace mcs

#endif  // MCS_HARNESS_HPP
