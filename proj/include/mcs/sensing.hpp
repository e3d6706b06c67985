#ifndef MCS_SENSING_HPP
#define MCS_SENSING_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "mcs/matrix.hpp"
#include "mcs/scenario.hpp"

namespace mcs {

// x_{i,j} = 1 iff user j invests rate r_i in task i. Row i doubles as the
// coalition for task i, column j as user j's strategy.
using ParticipationMatrix = BinaryMatrix;

// p_{i,j}: reward user j receives from the coalition for task i.
using PayoffDistribution = Matrix<double>;

// Distance-based value of a user to a task. Flat inside the task's area of
// interest, power-law decay outside; the floor keeps coincident points finite.
inline double contribution(const Task& task, double dist_to_task,
                            double lambda) {
  double d = std::max(dist_to_task, kMinDistanceKm);
  double denom = (d <= task.d0) ? task.d0 : d;
  return task.a / std::pow(denom, lambda);
}

inline double contribution(const Task& task, const User& user, double lambda) {
  return contribution(task, user.distances_to_tasks[task.id - 1], lambda);
}

// N x M matrix of Q_{i,j}; pure function of geometry, computed once per
// scenario and shared by every mechanism.
inline Matrix<double> contribution_matrix(const Scenario& s) {
  Matrix<double> q(s.n_tasks(), s.n_users());
  for (int i = 0; i < s.n_tasks(); ++i) {
    for (int j = 0; j < s.n_users(); ++j) {
      q(i, j) = contribution(s.tasks[i], s.users[j].distances_to_tasks[i],
                             s.params.contribution_exponent);
    }
  }
  return q;
}

inline double total_contribution(const Matrix<double>& q,
                                 const ParticipationMatrix& x, int i) {
  double sum = 0.0;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    if (x(i, j)) sum += q(i, j);
  }
  return sum;
}

// Gamma_i: linear in total contribution up to the saturation threshold,
// capped at phi_i beyond it.
inline double task_performance(const Task& task, double contribution_sum) {
  if (contribution_sum <= task.rho) {
    return task.phi / task.rho * contribution_sum;
  }
  return task.phi;
}

inline double task_performance(const Task& task, const Matrix<double>& q,
                               const ParticipationMatrix& x) {
  return task_performance(task, total_contribution(q, x, task.id - 1));
}

// PFM: total sensing performance across tasks.
inline double platform_performance(const std::vector<Task>& tasks,
                                   const Matrix<double>& q,
                                   const ParticipationMatrix& x) {
  double pfm = 0.0;
  for (const Task& t : tasks) pfm += task_performance(t, q, x);
  return pfm;
}

// What the BS charges user j for investing rate r_i in task i.
inline double rate_charge(const GlobalParams& p, const Task& task, bool x) {
  return x ? p.rate_charge_scale * task.r : 0.0;
}

inline double total_rate_charges(const GlobalParams& p,
                                 const std::vector<Task>& tasks,
                                 const ParticipationMatrix& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (x(i, j)) sum += p.rate_charge_scale * tasks[i].r;
    }
  }
  return sum;
}

// v(b^i) = alpha2 * Gamma_i; the empty coalition is worth 0.
inline double coalition_value(const Task& task, double contribution_sum,
                              double alpha2) {
  return alpha2 * task_performance(task, contribution_sum);
}

// Split v(b^i) among members in proportion to their contribution; outsiders
// get exactly 0. Conserves the coalition value.
inline std::vector<double> divide_payoff(const Task& task,
                                         const Matrix<double>& q,
                                         const ParticipationMatrix& x,
                                         double alpha2) {
  const int i = task.id - 1;
  std::vector<double> payoff(q.cols(), 0.0);
  double sum = total_contribution(q, x, i);
  if (sum <= 0.0) return payoff;
  double value = coalition_value(task, sum, alpha2);
  for (std::size_t j = 0; j < q.cols(); ++j) {
    if (x(i, j)) payoff[j] = value * q(i, j) / sum;
  }
  return payoff;
}

inline PayoffDistribution payoff_distribution(const std::vector<Task>& tasks,
                                              const Matrix<double>& q,
                                              const ParticipationMatrix& x,
                                              double alpha2) {
  PayoffDistribution p(q.rows(), q.cols());
  for (const Task& t : tasks) {
    std::vector<double> row = divide_payoff(t, q, x, alpha2);
    for (std::size_t j = 0; j < q.cols(); ++j) p(t.id - 1, j) = row[j];
  }
  return p;
}

// --- Utility functions -------------------------------------------------------

// Centralized: the platform keeps the full sensing performance plus its share
// of the rate charges and pays nobody.
inline double utility_centralized(const GlobalParams& p,
                                  const std::vector<Task>& tasks,
                                  const Matrix<double>& q,
                                  const ParticipationMatrix& x) {
  return platform_performance(tasks, q, x) +
         p.revenue_split * total_rate_charges(p, tasks, x);
}

inline double utility_noncoop_platform(const GlobalParams& p,
                                       const std::vector<Task>& tasks,
                                       const Matrix<double>& q,
                                       const ParticipationMatrix& x,
                                       double alpha1) {
  double reward = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    for (std::size_t j = 0; j < q.cols(); ++j) {
      if (x(i, j)) reward += q(i, j);
    }
  }
  return platform_performance(tasks, q, x) +
         p.revenue_split * total_rate_charges(p, tasks, x) - alpha1 * reward;
}

inline double utility_noncoop_user(const GlobalParams& p,
                                   const std::vector<Task>& tasks,
                                   const Matrix<double>& q,
                                   const ParticipationMatrix& x, int j,
                                   double alpha1) {
  double u = 0.0;
  for (std::size_t i = 0; i < q.rows(); ++i) {
    if (x(i, j)) u += alpha1 * q(i, j) - p.rate_charge_scale * tasks[i].r;
  }
  return u;
}

inline double utility_coop_platform(const GlobalParams& p,
                                    const std::vector<Task>& tasks,
                                    const Matrix<double>& q,
                                    const ParticipationMatrix& x,
                                    double alpha2) {
  return (1.0 - alpha2) * platform_performance(tasks, q, x) +
         p.revenue_split * total_rate_charges(p, tasks, x);
}

inline double utility_coop_user(const GlobalParams& p,
                                const std::vector<Task>& tasks,
                                const PayoffDistribution& payoffs,
                                const ParticipationMatrix& x, int j) {
  double u = 0.0;
  for (std::size_t i = 0; i < payoffs.rows(); ++i) {
    u += payoffs(i, j);
    if (x(i, j)) u -= p.rate_charge_scale * tasks[i].r;
  }
  return u;
}

// --- Utility report ----------------------------------------------------------

struct UtilityReport {
  double platform_utility = 0.0;
  double pfm = 0.0;
  std::vector<double> per_user_utility;
  double incentive_cost = 0.0;
  double bs_revenue_split = 0.0;
  std::uint64_t seed = 0;

  double user_utility_sum() const {
    double s = 0.0;
    for (double u : per_user_utility) s += u;
    return s;
  }

  friend bool operator==(const UtilityReport&, const UtilityReport&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(UtilityReport, platform_utility, pfm,
                                   per_user_utility, incentive_cost,
                                   bs_revenue_split, seed)

}  // namespace mcs

#endif  // MCS_SENSING_HPP
