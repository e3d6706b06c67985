#ifndef MCS_CHANNEL_HPP
#define MCS_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "mcs/matrix.hpp"
#include "mcs/rng.hpp"
#include "mcs/scenario.hpp"

namespace mcs {

// c_{k,j} = B log2(1 + P |h_{k,j}|^2 / sigma_n^2), b/s.
using CapacityMatrix = Matrix<double>;

// Which user, if any, holds each subcarrier. At most one holder per
// subcarrier by construction.
struct SubcarrierAssignment {
  static constexpr int kUnassigned = -1;
  std::vector<int> owner;  // length K, user index or kUnassigned

  int n_subcarriers() const { return static_cast<int>(owner.size()); }
  bool holds(int k, int j) const { return owner[k] == j; }

  friend bool operator==(const SubcarrierAssignment&,
                         const SubcarrierAssignment&) = default;
};

inline void to_json(nlohmann::json& j, const SubcarrierAssignment& a) {
  j = nlohmann::json::array();
  for (int k = 0; k < a.n_subcarriers(); ++k) {
    if (a.owner[k] != SubcarrierAssignment::kUnassigned) {
      j.push_back(nlohmann::json::array({k + 1, a.owner[k] + 1}));
    }
  }
}

inline SubcarrierAssignment assignment_from_json(const nlohmann::json& j,
                                                 int n_subcarriers) {
  SubcarrierAssignment a;
  a.owner.assign(n_subcarriers, SubcarrierAssignment::kUnassigned);
  for (const auto& pair : j) {
    int k = pair.at(0).get<int>() - 1;
    int u = pair.at(1).get<int>() - 1;
    if (k < 0 || k >= n_subcarriers) {
      throw std::invalid_argument("subcarrier index out of range");
    }
    if (a.owner[k] != SubcarrierAssignment::kUnassigned) {
      throw std::invalid_argument("subcarrier assigned twice");
    }
    a.owner[k] = u;
  }
  return a;
}

inline CapacityMatrix compute_capacities(const Scenario& s) {
  const auto& p = s.params;
  CapacityMatrix c(s.channel_gains.rows(), s.channel_gains.cols());
  for (std::size_t k = 0; k < c.rows(); ++k) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      double snr = p.tx_power * s.channel_gains(k, j) / p.noise_variance;
      c(k, j) = p.bandwidth * std::log2(1.0 + snr);
    }
  }
  return c;
}

// Total uplink rate a user can spend across tasks, b/s.
inline double user_budget(const CapacityMatrix& caps,
                          const SubcarrierAssignment& assign, int j) {
  double budget = 0.0;
  for (int k = 0; k < assign.n_subcarriers(); ++k) {
    if (assign.owner[k] == j) budget += caps(k, j);
  }
  return budget;
}

inline std::vector<double> user_budgets(const CapacityMatrix& caps,
                                        const SubcarrierAssignment& assign) {
  std::vector<double> budgets(caps.cols(), 0.0);
  for (int k = 0; k < assign.n_subcarriers(); ++k) {
    int j = assign.owner[k];
    if (j != SubcarrierAssignment::kUnassigned) budgets[j] += caps(k, j);
  }
  return budgets;
}

// Per-user check of the rate constraint: allocated capacity must cover the
// total feedback rate of the selected tasks (inclusive bound).
inline std::vector<bool> check_rate_feasible(const CapacityMatrix& caps,
                                             const SubcarrierAssignment& assign,
                                             const BinaryMatrix& participation,
                                             const std::vector<Task>& tasks) {
  const std::size_t m = caps.cols();
  std::vector<double> budgets = user_budgets(caps, assign);
  std::vector<bool> feasible(m, true);
  for (std::size_t j = 0; j < m; ++j) {
    double demand = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (participation(i, j)) demand += tasks[i].r;
    }
    feasible[j] = budgets[j] >= demand;
  }
  return feasible;
}

// Each subcarrier goes to an independently drawn uniform user.
inline SubcarrierAssignment allocate_random(const Scenario& s, Rng& rng) {
  SubcarrierAssignment a;
  a.owner.resize(s.params.n_subcarriers);
  for (int k = 0; k < s.params.n_subcarriers; ++k) {
    a.owner[k] = static_cast<int>(rng.uniform_int(s.n_users()));
  }
  return a;
}

// Users ranked by total contribution per unit rate, RK_j = sum_i Q_{i,j}/r_i;
// rounds walk the ranking, each user taking its best remaining subcarrier,
// until every subcarrier is held. Ties: lower user id first, lower
// subcarrier id first.
inline SubcarrierAssignment allocate_priority(const Scenario& s,
                                              const CapacityMatrix& caps,
                                              const Matrix<double>& q) {
  const int m = s.n_users();
  const int n = s.n_tasks();
  const int n_sub = s.params.n_subcarriers;

  std::vector<double> rank_key(m, 0.0);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) rank_key[j] += q(i, j) / s.tasks[i].r;
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return rank_key[a] > rank_key[b];
  });

  SubcarrierAssignment a;
  a.owner.assign(n_sub, SubcarrierAssignment::kUnassigned);
  int remaining = n_sub;
  while (remaining > 0) {
    for (int j : order) {
      if (remaining == 0) break;
      int best = -1;
      for (int k = 0; k < n_sub; ++k) {
        if (a.owner[k] != SubcarrierAssignment::kUnassigned) continue;
        if (best == -1 || caps(k, j) > caps(best, j)) best = k;
      }
      a.owner[best] = j;
      --remaining;
    }
  }
  return a;
}

}  // namespace mcs

#endif  // MCS_CHANNEL_HPP
