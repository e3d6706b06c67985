#ifndef MCS_INSTANCE_HPP
#define MCS_INSTANCE_HPP

#include "mcs/channel.hpp"
#include "mcs/scenario.hpp"
#include "mcs/sensing.hpp"

namespace mcs {

// Scenario plus the two matrices every mechanism needs. Built once, then
// treated as read-only.
struct Instance {
  Scenario scenario;
  Matrix<double> q;      // N x M contributions
  CapacityMatrix caps;   // K x M subcarrier capacities

  int n_tasks() const { return scenario.n_tasks(); }
  int n_users() const { return scenario.n_users(); }
  const GlobalParams& params() const { return scenario.params; }
  const std::vector<Task>& tasks() const { return scenario.tasks; }
};

inline Instance make_instance(Scenario scenario) {
  Instance inst;
  inst.q = contribution_matrix(scenario);
  inst.caps = compute_capacities(scenario);
  inst.scenario = std::move(scenario);
  return inst;
}

inline Instance make_instance(const GlobalParams& params, int n_tasks,
                              int n_users) {
  return make_instance(generate_scenario(params, n_tasks, n_users));
}

}  // namespace mcs

#endif  // MCS_INSTANCE_HPP
