#ifndef MCS_OPTIMIZERS_HPP
#define MCS_OPTIMIZERS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcs/instance.hpp"
#include "mcs/knapsack.hpp"
#include "mcs/outcome.hpp"
#include "mcs/rng.hpp"

namespace mcs {

// t(rank, j): task index (0-based) of user j's rank-th preferred task.
// Columns are permutations ordered by Q_{i,j}/r_i descending.
using PreferenceMatrix = Matrix<int>;

inline PreferenceMatrix build_preference_matrix(const Instance& inst) {
  const int n = inst.n_tasks();
  const int m = inst.n_users();
  PreferenceMatrix prefs(n, m);
  std::vector<int> order(n);
  for (int j = 0; j < m; ++j) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return inst.q(a, j) / inst.tasks()[a].r >
             inst.q(b, j) / inst.tasks()[b].r;
    });
    for (int rank = 0; rank < n; ++rank) prefs(rank, j) = order[rank];
  }
  return prefs;
}

// How followers turn a rate budget into a task selection.
//  - literal_prefix: take tasks in preference order while the cumulative rate
//    fits the budget, regardless of whether a task pays off.
//  - value_prefix: same walk, but stop at the first task whose reward does
//    not cover its rate charge. Since preference order is value-density
//    order, the profitable tasks form a prefix.
//  - exact: solve the 0-1 knapsack exactly.
enum class FollowerPolicy { value_prefix, literal_prefix, exact };

inline std::string to_string(FollowerPolicy p) {
  switch (p) {
    case FollowerPolicy::value_prefix: return "value-prefix";
    case FollowerPolicy::literal_prefix: return "literal-prefix";
    case FollowerPolicy::exact: return "exact";
  }
  throw std::logic_error("bad follower policy");
}

inline FollowerPolicy follower_policy_from_string(const std::string& s) {
  if (s == "value-prefix") return FollowerPolicy::value_prefix;
  if (s == "literal-prefix") return FollowerPolicy::literal_prefix;
  if (s == "exact") return FollowerPolicy::exact;
  throw std::invalid_argument("unknown follower policy: " + s);
}

inline std::vector<std::uint8_t> follower_prefix_selection(
    const PreferenceMatrix& prefs, double budget,
    const std::vector<Task>& tasks, int j) {
  std::vector<std::uint8_t> sel(tasks.size(), 0);
  double cum = 0.0;
  for (std::size_t rank = 0; rank < tasks.size(); ++rank) {
    int t = prefs(rank, j);
    cum += tasks[t].r;
    if (cum > budget) break;
    sel[t] = 1;
  }
  return sel;
}

inline std::vector<std::uint8_t> follower_value_prefix(
    const PreferenceMatrix& prefs, double budget,
    const std::vector<Task>& tasks, const Matrix<double>& q, double beta,
    int j, double alpha1) {
  std::vector<std::uint8_t> sel(tasks.size(), 0);
  double cum = 0.0;
  for (std::size_t rank = 0; rank < tasks.size(); ++rank) {
    int t = prefs(rank, j);
    if (alpha1 * q(t, j) - beta * tasks[t].r <= 0.0) break;
    cum += tasks[t].r;
    if (cum > budget) break;
    sel[t] = 1;
  }
  return sel;
}

inline knapsack::Result follower_exact_knapsack(const Instance& inst,
                                                double budget, int j,
                                                double alpha1,
                                                long node_budget = 4'000'000) {
  const auto& tasks = inst.tasks();
  std::vector<double> values(tasks.size()), weights(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    values[i] =
        alpha1 * inst.q(i, j) - inst.params().rate_charge_scale * tasks[i].r;
    weights[i] = tasks[i].r;
  }
  return knapsack::solve_exact(values, weights, budget, node_budget);
}

inline std::vector<std::uint8_t> follower_select(
    FollowerPolicy policy, const Instance& inst, const PreferenceMatrix& prefs,
    double budget, int j, double alpha1) {
  switch (policy) {
    case FollowerPolicy::literal_prefix:
      return follower_prefix_selection(prefs, budget, inst.tasks(), j);
    case FollowerPolicy::value_prefix:
      return follower_value_prefix(prefs, budget, inst.tasks(), inst.q,
                                   inst.params().rate_charge_scale, j, alpha1);
    case FollowerPolicy::exact:
      return follower_exact_knapsack(inst, budget, j, alpha1).take;
  }
  throw std::logic_error("bad follower policy");
}

inline ParticipationMatrix predict_participation(
    FollowerPolicy policy, const Instance& inst, const PreferenceMatrix& prefs,
    const std::vector<double>& budgets, double alpha1) {
  ParticipationMatrix x(inst.n_tasks(), inst.n_users());
  for (int j = 0; j < inst.n_users(); ++j) {
    auto col = follower_select(policy, inst, prefs, budgets[j], j, alpha1);
    for (int i = 0; i < inst.n_tasks(); ++i) x(i, j) = col[i];
  }
  return x;
}

struct SolverOptions {
  // What users actually do once budgets are fixed.
  FollowerPolicy follower_policy = FollowerPolicy::value_prefix;
  // What the BS assumes they will do when it allocates subcarriers. The
  // default deliberately keeps the budget-only prefix here: the BS plans
  // against reported preferences alone, while users skip tasks that do not
  // pay. Set equal to follower_policy for a self-consistent equilibrium.
  FollowerPolicy leader_prediction = FollowerPolicy::literal_prefix;
  int leader_restarts = 20;
  double leader_exhaustive_cap = 1e6;   // on (M+1)^K
  double central_exhaustive_cap = 4e6;  // on (M+1)^K * 2^(N*M)
  int central_rounds = 4;
  long knapsack_node_budget = 4'000'000;
};

namespace detail {

// Incrementally evaluates the leader objective U(X(S)) for prefix-style
// followers while subcarriers are reassigned one at a time. Selections are
// prefixes of each user's preference list, so a budget change only touches a
// contiguous run of tasks.
class LeaderEval {
 public:
  LeaderEval(const Instance& inst, const PreferenceMatrix& prefs,
             FollowerPolicy policy, double alpha1)
      : inst_(inst), prefs_(prefs), alpha1_(alpha1) {
    const int n = inst.n_tasks();
    const int m = inst.n_users();
    const double beta = inst.params().rate_charge_scale;
    cum_.assign(m, std::vector<double>(n + 1, 0.0));
    max_len_.assign(m, n);
    for (int j = 0; j < m; ++j) {
      for (int rank = 0; rank < n; ++rank) {
        int t = prefs(rank, j);
        cum_[j][rank + 1] = cum_[j][rank] + inst.tasks()[t].r;
        if (policy == FollowerPolicy::value_prefix && max_len_[j] == n &&
            alpha1 * inst.q(t, j) - beta * inst.tasks()[t].r <= 0.0) {
          max_len_[j] = rank;
        }
      }
    }
    reset(std::vector<int>(inst.params().n_subcarriers,
                           SubcarrierAssignment::kUnassigned));
  }

  void reset(const std::vector<int>& owner) {
    const int n = inst_.n_tasks();
    const int m = inst_.n_users();
    owner_ = owner;
    budgets_.assign(m, 0.0);
    for (int k = 0; k < static_cast<int>(owner_.size()); ++k) {
      if (owner_[k] >= 0) budgets_[owner_[k]] += inst_.caps(k, owner_[k]);
    }
    sel_len_.assign(m, 0);
    tc_.assign(n, 0.0);
    pfm_ = 0.0;
    rates_sum_ = 0.0;
    reward_sum_ = 0.0;
    for (const Task& t : inst_.tasks()) pfm_ += task_performance(t, 0.0);
    for (int j = 0; j < m; ++j) grow_or_shrink(j, prefix_len(j));
  }

  double utility() const {
    const auto& p = inst_.params();
    return pfm_ + p.revenue_split * p.rate_charge_scale * rates_sum_ -
           alpha1_ * reward_sum_;
  }

  void set_owner(int k, int j) {
    int old = owner_[k];
    if (old == j) return;
    owner_[k] = j;
    if (old >= 0) {
      budgets_[old] -= inst_.caps(k, old);
      grow_or_shrink(old, prefix_len(old));
    }
    if (j >= 0) {
      budgets_[j] += inst_.caps(k, j);
      grow_or_shrink(j, prefix_len(j));
    }
  }

  const std::vector<int>& owner() const { return owner_; }

  ParticipationMatrix participation() const {
    ParticipationMatrix x(inst_.n_tasks(), inst_.n_users());
    for (int j = 0; j < inst_.n_users(); ++j) {
      for (int rank = 0; rank < sel_len_[j]; ++rank) x(prefs_(rank, j), j) = 1;
    }
    return x;
  }

 private:
  int prefix_len(int j) const {
    const auto& cum = cum_[j];
    int len = static_cast<int>(
        std::upper_bound(cum.begin() + 1, cum.end(), budgets_[j]) -
        (cum.begin() + 1));
    return std::min(len, max_len_[j]);
  }

  void grow_or_shrink(int j, int new_len) {
    int old_len = sel_len_[j];
    if (new_len == old_len) return;
    int lo = std::min(old_len, new_len);
    int hi = std::max(old_len, new_len);
    double sign = (new_len > old_len) ? 1.0 : -1.0;
    for (int rank = lo; rank < hi; ++rank) {
      int t = prefs_(rank, j);
      const Task& task = inst_.tasks()[t];
      double before = task_performance(task, tc_[t]);
      tc_[t] += sign * inst_.q(t, j);
      pfm_ += task_performance(task, tc_[t]) - before;
      rates_sum_ += sign * task.r;
      reward_sum_ += sign * inst_.q(t, j);
    }
    sel_len_[j] = new_len;
  }

  const Instance& inst_;
  const PreferenceMatrix& prefs_;
  double alpha1_;
  std::vector<std::vector<double>> cum_;  // per user, cumulative prefix rates
  std::vector<int> max_len_;              // value-positive prefix length
  std::vector<int> owner_;
  std::vector<double> budgets_;
  std::vector<int> sel_len_;
  std::vector<double> tc_;  // per-task total contribution
  double pfm_ = 0.0;
  double rates_sum_ = 0.0;
  double reward_sum_ = 0.0;
};

// Objective recomputed from scratch; reference path for the exact follower
// policy where selections are not budget-monotone prefixes.
inline double eval_leader_objective(const Instance& inst,
                                    const PreferenceMatrix& prefs,
                                    FollowerPolicy policy, double alpha1,
                                    const std::vector<int>& owner) {
  SubcarrierAssignment a{.owner = owner};
  std::vector<double> budgets = user_budgets(inst.caps, a);
  ParticipationMatrix x =
      predict_participation(policy, inst, prefs, budgets, alpha1);
  return utility_noncoop_platform(inst.params(), inst.tasks(), inst.q, x,
                                  alpha1);
}

}  // namespace detail

// Leader step of the two-phase mechanism: pick the subcarrier assignment that
// maximizes platform utility under the predicted follower response. Exhausts
// the (M+1)^K space when it is small, otherwise runs first-improvement local
// search over single-subcarrier reassignments with random restarts.
inline std::pair<SubcarrierAssignment, SolverDiagnostics> leader_allocate(
    const Instance& inst, const PreferenceMatrix& prefs, double alpha1,
    const SolverOptions& opt = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  const int m = inst.n_users();
  const int n_sub = inst.params().n_subcarriers;
  SolverDiagnostics diag;

  const FollowerPolicy predicted = opt.leader_prediction;
  const bool prefix_predictor = predicted != FollowerPolicy::exact;
  detail::LeaderEval eval(inst, prefs, predicted, alpha1);

  auto objective = [&](const std::vector<int>& owner) {
    if (prefix_predictor) {
      eval.reset(owner);
      return eval.utility();
    }
    return detail::eval_leader_objective(inst, prefs, predicted, alpha1,
                                         owner);
  };

  double space = std::pow(static_cast<double>(m) + 1.0, n_sub);
  if (space <= opt.leader_exhaustive_cap) {
    // Odometer over all assignments, unassigned included.
    std::vector<int> owner(n_sub, SubcarrierAssignment::kUnassigned);
    std::vector<int> best_owner = owner;
    double best = objective(owner);
    ++diag.iterations;
    while (true) {
      int k = 0;
      while (k < n_sub && owner[k] == m - 1) {
        owner[k] = SubcarrierAssignment::kUnassigned;
        ++k;
      }
      if (k == n_sub) break;
      ++owner[k];
      double u = objective(owner);
      ++diag.iterations;
      if (u > best) {
        best = u;
        best_owner = owner;
      }
    }
    diag.exact = true;
    diag.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
    return {SubcarrierAssignment{.owner = best_owner}, diag};
  }

  // Local search. Restart 0 starts from the greedy max-capacity assignment,
  // the rest from random assignments.
  Rng rng(derive_seed(inst.params().rng_seed, 101));
  std::vector<int> best_owner;
  double best = -std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, opt.leader_restarts);
  for (int r = 0; r < restarts; ++r) {
    std::vector<int> owner(n_sub);
    if (r == 0) {
      for (int k = 0; k < n_sub; ++k) {
        int arg = 0;
        for (int j = 1; j < m; ++j) {
          if (inst.caps(k, j) > inst.caps(k, arg)) arg = j;
        }
        owner[k] = arg;
      }
    } else {
      for (int k = 0; k < n_sub; ++k) {
        owner[k] = static_cast<int>(rng.uniform_int(m + 1)) - 1;
      }
    }

    double current;
    if (prefix_predictor) {
      eval.reset(owner);
      current = eval.utility();
    } else {
      current = detail::eval_leader_objective(inst, prefs, predicted, alpha1,
                                              owner);
    }

    // The incremental evaluator drifts by an ulp or two per apply/revert, so
    // demand improvements well above that and resynchronize after every
    // sweep; otherwise noise-level "gains" can cycle forever.
    constexpr double kImprove = 1e-7;
    bool improved = true;
    for (int sweep = 0; improved && sweep < 1000; ++sweep) {
      improved = false;
      for (int k = 0; k < n_sub; ++k) {
        int old = owner[k];
        int best_cand = old;
        double best_u = current;
        for (int cand = -1; cand < m; ++cand) {
          if (cand == old) continue;
          ++diag.iterations;
          double u;
          if (prefix_predictor) {
            eval.set_owner(k, cand);
            u = eval.utility();
            eval.set_owner(k, old);
          } else {
            owner[k] = cand;
            u = detail::eval_leader_objective(inst, prefs, predicted, alpha1,
                                              owner);
            owner[k] = old;
          }
          if (u > best_u + kImprove) {
            best_u = u;
            best_cand = cand;
          }
        }
        if (best_cand != old) {
          owner[k] = best_cand;
          if (prefix_predictor) {
            eval.set_owner(k, best_cand);
            current = eval.utility();
          } else {
            current = best_u;
          }
          improved = true;
        }
      }
      if (prefix_predictor && improved) {
        eval.reset(owner);
        current = eval.utility();
      }
    }
    if (current > best) {
      best = current;
      best_owner = owner;
    }
  }
  diag.wall_time = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
  return {SubcarrierAssignment{.owner = best_owner}, diag};
}

inline UtilityReport make_noncoop_report(const Instance& inst,
                                         const ParticipationMatrix& x,
                                         double alpha1) {
  const auto& p = inst.params();
  UtilityReport rep;
  rep.pfm = platform_performance(inst.tasks(), inst.q, x);
  rep.platform_utility =
      utility_noncoop_platform(p, inst.tasks(), inst.q, x, alpha1);
  rep.per_user_utility.resize(inst.n_users());
  double reward = 0.0;
  for (int j = 0; j < inst.n_users(); ++j) {
    rep.per_user_utility[j] =
        utility_noncoop_user(p, inst.tasks(), inst.q, x, j, alpha1);
    for (int i = 0; i < inst.n_tasks(); ++i) {
      if (x(i, j)) reward += inst.q(i, j);
    }
  }
  rep.incentive_cost = alpha1 * reward;
  rep.bs_revenue_split =
      p.revenue_split * total_rate_charges(p, inst.tasks(), x);
  rep.seed = p.rng_seed;
  return rep;
}

// Two-phase non-cooperative mechanism: the BS fixes the assignment against
// the predicted response, then each user selects tasks on its own.
inline MechanismOutcome run_noncooperative(const Instance& inst, double alpha1,
                                           const SolverOptions& opt = {}) {
  PreferenceMatrix prefs = build_preference_matrix(inst);
  auto [assign, diag] = leader_allocate(inst, prefs, alpha1, opt);

  std::vector<double> budgets = user_budgets(inst.caps, assign);
  ParticipationMatrix x = predict_participation(opt.follower_policy, inst,
                                                prefs, budgets, alpha1);

  MechanismOutcome out;
  out.mode = Mode::noncoop;
  out.seed = inst.params().rng_seed;
  out.params = inst.params();
  out.n_tasks = inst.n_tasks();
  out.n_users = inst.n_users();
  out.alpha = alpha1;
  out.assignment = assign;
  out.participation = x;
  out.report = make_noncoop_report(inst, x, alpha1);
  out.solver = diag;
  return out;
}

inline UtilityReport make_centralized_report(const Instance& inst,
                                             const ParticipationMatrix& x) {
  const auto& p = inst.params();
  UtilityReport rep;
  rep.pfm = platform_performance(inst.tasks(), inst.q, x);
  rep.platform_utility = utility_centralized(p, inst.tasks(), inst.q, x);
  rep.per_user_utility.assign(inst.n_users(), 0.0);
  rep.incentive_cost = 0.0;
  rep.bs_revenue_split =
      p.revenue_split * total_rate_charges(p, inst.tasks(), x);
  rep.seed = p.rng_seed;
  return rep;
}

namespace detail {

// Joint exhaustive search over assignments and participations; only viable
// for toy sizes, used as the exact reference configuration.
inline std::pair<SubcarrierAssignment, ParticipationMatrix>
centralized_exhaustive(const Instance& inst) {
  const int m = inst.n_users();
  const int n = inst.n_tasks();
  const int n_sub = inst.params().n_subcarriers;
  const int cells = n * m;

  SubcarrierAssignment best_assign;
  best_assign.owner.assign(n_sub, SubcarrierAssignment::kUnassigned);
  ParticipationMatrix best_x(n, m);
  double best = utility_centralized(inst.params(), inst.tasks(), inst.q,
                                    best_x);

  std::vector<int> owner(n_sub, SubcarrierAssignment::kUnassigned);
  bool more_assignments = true;
  while (more_assignments) {
    SubcarrierAssignment a{.owner = owner};
    std::vector<double> budgets = user_budgets(inst.caps, a);
    for (std::uint64_t bits = 0; bits < (1ull << cells); ++bits) {
      ParticipationMatrix x(n, m);
      for (int c = 0; c < cells; ++c) {
        if (bits & (1ull << c)) x.data()[c] = 1;
      }
      bool feasible = true;
      for (int j = 0; j < m && feasible; ++j) {
        double demand = 0.0;
        for (int i = 0; i < n; ++i) {
          if (x(i, j)) demand += inst.tasks()[i].r;
        }
        feasible = demand <= budgets[j];
      }
      if (!feasible) continue;
      double u = utility_centralized(inst.params(), inst.tasks(), inst.q, x);
      if (u > best) {
        best = u;
        best_assign = a;
        best_x = x;
      }
    }
    int k = 0;
    while (k < n_sub && owner[k] == m - 1) {
      owner[k] = SubcarrierAssignment::kUnassigned;
      ++k;
    }
    if (k == n_sub) {
      more_assignments = false;
    } else {
      ++owner[k];
    }
  }
  return {best_assign, best_x};
}

}  // namespace detail

// Upper-bound mechanism: platform and BS jointly choose assignment and
// participation. Exact by enumeration at toy scale; otherwise alternates
// per-user knapsacks over marginal task values with a local repair of the
// subcarrier assignment, reported as a heuristic estimate.
inline MechanismOutcome run_centralized(const Instance& inst,
                                        const SolverOptions& opt = {}) {
  const auto t_start = std::chrono::steady_clock::now();
  const int m = inst.n_users();
  const int n = inst.n_tasks();
  const int n_sub = inst.params().n_subcarriers;
  const auto& p = inst.params();

  MechanismOutcome out;
  out.mode = Mode::centralized;
  out.seed = p.rng_seed;
  out.params = p;
  out.n_tasks = n;
  out.n_users = m;
  out.alpha = 0.0;

  double space = std::pow(static_cast<double>(m) + 1.0, n_sub) *
                 std::pow(2.0, n * m);
  if (n * m <= 62 && space <= opt.central_exhaustive_cap) {
    auto [assign, x] = detail::centralized_exhaustive(inst);
    out.assignment = assign;
    out.participation = x;
    out.solver.exact = true;
    out.solver.iterations = static_cast<long>(space);
    out.solver.wall_time = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t_start)
                               .count();
    out.report = make_centralized_report(inst, x);
    return out;
  }

  // Heuristic: greedy assignment, then alternate (a) per-user knapsacks whose
  // item values are the marginal performance gain plus the revenue share and
  // (b) single-subcarrier moves toward users that still have profitable
  // unmet demand.
  SolverDiagnostics diag;
  SubcarrierAssignment assign;
  assign.owner.resize(n_sub);
  for (int k = 0; k < n_sub; ++k) {
    int arg = 0;
    for (int j = 1; j < m; ++j) {
      if (inst.caps(k, j) > inst.caps(k, arg)) arg = j;
    }
    assign.owner[k] = arg;
  }
  std::vector<double> budgets = user_budgets(inst.caps, assign);

  ParticipationMatrix x(n, m);
  std::vector<double> tc(n, 0.0);

  auto solve_user = [&](int j) -> bool {
    // Remove j's column, price items against the remaining contributions.
    for (int i = 0; i < n; ++i) {
      if (x(i, j)) tc[i] -= inst.q(i, j);
    }
    std::vector<double> values(n), weights(n);
    for (int i = 0; i < n; ++i) {
      const Task& t = inst.tasks()[i];
      double marginal =
          task_performance(t, tc[i] + inst.q(i, j)) - task_performance(t, tc[i]);
      values[i] = marginal + p.revenue_split * p.rate_charge_scale * t.r;
      weights[i] = t.r;
    }
    knapsack::Result sol;
    try {
      sol = knapsack::solve_exact(values, weights, budgets[j],
                                  opt.knapsack_node_budget);
    } catch (const knapsack::BudgetExceeded&) {
      sol = knapsack::solve_scaled_dp(values, weights, budgets[j]);
    }
    diag.nodes_explored += sol.nodes;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      if (x(i, j) != sol.take[i]) changed = true;
      x(i, j) = sol.take[i];
      if (x(i, j)) tc[i] += inst.q(i, j);
    }
    return changed;
  };

  auto x_step = [&]() {
    for (int pass = 0; pass < 6; ++pass) {
      bool changed = false;
      for (int j = 0; j < m; ++j) changed |= solve_user(j);
      if (!changed) break;
    }
  };

  auto objective = [&]() {
    return utility_centralized(p, inst.tasks(), inst.q, x);
  };

  x_step();
  for (int round = 0; round < opt.central_rounds; ++round) {
    // Users that could profitably take one more task if their budget grew.
    std::vector<std::uint8_t> wants(m, 0);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < n; ++i) {
        if (x(i, j)) continue;
        const Task& t = inst.tasks()[i];
        double marginal = task_performance(t, tc[i] + inst.q(i, j)) -
                          task_performance(t, tc[i]);
        if (marginal + p.revenue_split * p.rate_charge_scale * t.r > 1e-12) {
          wants[j] = 1;
          break;
        }
      }
    }
    bool moved = false;
    double current = objective();
    for (int k = 0; k < n_sub; ++k) {
      int old = assign.owner[k];
      for (int cand = 0; cand < m; ++cand) {
        if (cand == old || !wants[cand]) continue;
        ++diag.iterations;
        auto saved_x = x;
        auto saved_tc = tc;
        assign.owner[k] = cand;
        budgets[old] -= inst.caps(k, old);
        budgets[cand] += inst.caps(k, cand);
        solve_user(old);
        solve_user(cand);
        double u = objective();
        if (u > current + 1e-9) {
          current = u;
          old = cand;
          moved = true;
        } else {
          assign.owner[k] = old;
          budgets[old] += inst.caps(k, old);
          budgets[cand] -= inst.caps(k, cand);
          x = std::move(saved_x);
          tc = std::move(saved_tc);
        }
      }
    }
    if (!moved) break;
    x_step();
  }

  diag.wall_time = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
  out.assignment = assign;
  out.participation = x;
  out.solver = diag;
  out.report = make_centralized_report(inst, x);
  return out;
}

}  // namespace mcs

#endif  // MCS_OPTIMIZERS_HPP
