#ifndef MCS_OUTCOME_HPP
#define MCS_OUTCOME_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcs/channel.hpp"
#include "mcs/matrix.hpp"
#include "mcs/scenario.hpp"
#include "mcs/sensing.hpp"

namespace mcs {

enum class Mode { centralized, noncoop, ocf_random, ocf_priority };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::centralized: return "centralized";
    case Mode::noncoop: return "noncoop";
    case Mode::ocf_random: return "ocf-random";
    case Mode::ocf_priority: return "ocf-priority";
  }
  throw std::logic_error("bad mode");
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "centralized") return Mode::centralized;
  if (s == "noncoop") return Mode::noncoop;
  if (s == "ocf-random") return Mode::ocf_random;
  if (s == "ocf-priority") return Mode::ocf_priority;
  throw std::invalid_argument("unknown mode: " + s);
}

struct SolverDiagnostics {
  long iterations = 0;      // objective evaluations / local-search moves
  long nodes_explored = 0;  // knapsack search nodes
  double wall_time = 0.0;   // seconds; not serialized, outputs stay bit-stable
  bool exact = false;       // true only when the search space was exhausted

  std::string optimality_flag() const { return exact ? "exact" : "heuristic"; }
};

inline void to_json(nlohmann::json& j, const SolverDiagnostics& d) {
  j = nlohmann::json{{"iterations", d.iterations},
                     {"nodes_explored", d.nodes_explored},
                     {"optimality", d.optimality_flag()}};
}

struct OcfDiagnostics {
  long iterations_to_converge = 0;  // user turns in the shift loop
  long sweeps = 0;                  // full passes over all users
  long transfer_attempts = 0;
  long transfers_executed = 0;
  long quits = 0;
  long joins = 0;
  long messages_estimate = 0;
  bool converged = false;
  long safety_violations = 0;  // leave/permission harm checks that fired
  std::vector<long> attempts_per_sweep;
  std::vector<double> total_user_utility_trace;
};

inline void to_json(nlohmann::json& j, const OcfDiagnostics& d) {
  j = nlohmann::json{{"iterations_to_converge", d.iterations_to_converge},
                     {"sweeps", d.sweeps},
                     {"transfer_attempts", d.transfer_attempts},
                     {"transfers_executed", d.transfers_executed},
                     {"quits", d.quits},
                     {"joins", d.joins},
                     {"messages_estimate", d.messages_estimate},
                     {"converged", d.converged},
                     {"attempts_per_sweep", d.attempts_per_sweep},
                     {"total_user_utility_trace", d.total_user_utility_trace}};
}

// Everything one mechanism run produces: who holds which subcarrier, who
// participates where, the resulting utilities, and how hard the solver worked.
struct MechanismOutcome {
  Mode mode = Mode::centralized;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  GlobalParams params;  // enough to regenerate the scenario with `seed`
  int n_tasks = 0;
  int n_users = 0;
  double alpha = 0.0;  // incentive intensity used (0 for centralized)
  SubcarrierAssignment assignment;
  ParticipationMatrix participation;
  UtilityReport report;
  SolverDiagnostics solver;
  OcfDiagnostics ocf;
};

inline void to_json(nlohmann::json& j, const MechanismOutcome& o) {
  nlohmann::json x = nlohmann::json::array();
  for (std::size_t i = 0; i < o.participation.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t m = 0; m < o.participation.cols(); ++m) {
      row.push_back(static_cast<int>(o.participation(i, m)));
    }
    x.push_back(std::move(row));
  }
  nlohmann::json diagnostics;
  if (o.mode == Mode::ocf_random || o.mode == Mode::ocf_priority) {
    diagnostics = o.ocf;
  } else {
    diagnostics = o.solver;
  }
  j = nlohmann::json{{"schema", "mcs.outcome/1"},
                     {"mode", to_string(o.mode)},
                     {"seed", o.seed},
                     {"config_hash", o.config_hash},
                     {"params", o.params},
                     {"n_tasks", o.n_tasks},
                     {"n_users", o.n_users},
                     {"alpha", o.alpha},
                     {"assignment", o.assignment},
                     {"participation", std::move(x)},
                     {"utilities", o.report},
                     {"diagnostics", std::move(diagnostics)}};
}

inline MechanismOutcome outcome_from_json(const nlohmann::json& j) {
  if (j.at("schema").get<std::string>() != "mcs.outcome/1") {
    throw std::invalid_argument("unsupported outcome schema");
  }
  MechanismOutcome o;
  o.mode = mode_from_string(j.at("mode").get<std::string>());
  o.seed = j.at("seed").get<std::uint64_t>();
  o.config_hash = j.at("config_hash").get<std::uint64_t>();
  o.params = j.at("params").get<GlobalParams>();
  o.n_tasks = j.at("n_tasks").get<int>();
  o.n_users = j.at("n_users").get<int>();
  o.alpha = j.at("alpha").get<double>();
  o.assignment =
      assignment_from_json(j.at("assignment"), o.params.n_subcarriers);
  const auto& x = j.at("participation");
  o.participation = ParticipationMatrix(o.n_tasks, o.n_users);
  for (int i = 0; i < o.n_tasks; ++i) {
    for (int m = 0; m < o.n_users; ++m) {
      o.participation(i, m) =
          static_cast<std::uint8_t>(x.at(i).at(m).get<int>());
    }
  }
  o.report = j.at("utilities").get<UtilityReport>();
  return o;
}

}  // namespace mcs

#endif  // MCS_OUTCOME_HPP
