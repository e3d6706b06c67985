#ifndef MCS_TESTS_HELPERS_HPP
#define MCS_TESTS_HELPERS_HPP

#include <vector>

#include "mcs/instance.hpp"
#include "mcs/rng.hpp"
#include "mcs/scenario.hpp"
#include "mcs/sensing.hpp"

namespace mcs::test {

// Hand-built scenario with explicit geometry; channel gains are filled with
// a constant so capacities are uniform unless a test overrides them.
struct ScenarioBuilder {
  GlobalParams params;
  std::vector<Task> tasks;
  std::vector<User> users;
  double gain = 1.0;

  ScenarioBuilder() {
    params.side_length = 10.0;
    params.n_subcarriers = 2;
  }

  ScenarioBuilder& with_params(const GlobalParams& p) {
    params = p;
    return *this;
  }

  ScenarioBuilder& add_task(Point loc, double a, double d0, double r,
                            double rho, double phi) {
    Task t;
    t.id = static_cast<int>(tasks.size()) + 1;
    t.location = loc;
    t.a = a;
    t.d0 = d0;
    t.r = r;
    t.rho = rho;
    t.phi = phi;
    tasks.push_back(t);
    return *this;
  }

  ScenarioBuilder& add_user(Point loc) {
    User u;
    u.id = static_cast<int>(users.size()) + 1;
    u.location = loc;
    users.push_back(u);
    return *this;
  }

  Scenario build() const {
    Scenario s;
    s.params = params;
    s.tasks = tasks;
    s.users = users;
    const Point bs = s.bs_location();
    for (User& u : s.users) {
      u.distance_to_bs = distance(u.location, bs);
      u.distances_to_tasks.resize(s.tasks.size());
      for (std::size_t i = 0; i < s.tasks.size(); ++i) {
        u.distances_to_tasks[i] = distance(u.location, s.tasks[i].location);
      }
    }
    s.channel_gains =
        Matrix<double>(params.n_subcarriers, s.users.size(), gain);
    return s;
  }

  Instance instance() const { return make_instance(build()); }
};

inline ParticipationMatrix random_participation(int n, int m, Rng& rng,
                                                double p_one = 0.4) {
  ParticipationMatrix x(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      x(i, j) = rng.uniform01() < p_one ? 1 : 0;
    }
  }
  return x;
}

}  // namespace mcs::test

#endif  // MCS_TESTS_HELPERS_HPP
