#ifndef MCS_OCF_HPP
#define MCS_OCF_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcs/instance.hpp"
#include "mcs/optimizers.hpp"
#include "mcs/outcome.hpp"

namespace mcs {

// Mutable state of one coalition-formation run. Row i of `x` is the coalition
// for task i, column j is user j's strategy. `tc` caches each coalition's
// total member contribution so payoffs are O(1).
struct CoalitionState {
  ParticipationMatrix x;
  std::vector<double> budgets;    // per user, b/s, fixed for the whole run
  std::vector<double> rate_used;  // per user, sum of joined task rates
  std::vector<double> tc;         // per coalition, sum of member contributions
  long iteration = 0;

  int n_tasks() const { return static_cast<int>(tc.size()); }
  int n_users() const { return static_cast<int>(budgets.size()); }
};

enum class OcfOp { transfer, quit, join };

inline std::string to_string(OcfOp op) {
  switch (op) {
    case OcfOp::transfer: return "transfer";
    case OcfOp::quit: return "quit";
    case OcfOp::join: return "join";
  }
  throw std::logic_error("bad op");
}

struct TraceEvent {
  long iteration = 0;
  int user = 0;  // 1-based in output
  OcfOp op = OcfOp::transfer;
  int from = 0;  // 1-based task id, 0 = none
  int to = 0;
  double utility_before = 0.0;
  double utility_after = 0.0;
};

inline void to_json(nlohmann::json& j, const TraceEvent& e) {
  j = nlohmann::json{{"iteration", e.iteration},
                     {"user", e.user},
                     {"op", to_string(e.op)},
                     {"from", e.from},
                     {"to", e.to},
                     {"utility_before", e.utility_before},
                     {"utility_after", e.utility_after}};
}

// Every user starts from the affordable prefix of its preference list.
inline CoalitionState init_ocs(const Instance& inst,
                               const SubcarrierAssignment& assign) {
  CoalitionState st;
  st.budgets = user_budgets(inst.caps, assign);
  st.x = ParticipationMatrix(inst.n_tasks(), inst.n_users());
  st.rate_used.assign(inst.n_users(), 0.0);
  st.tc.assign(inst.n_tasks(), 0.0);

  PreferenceMatrix prefs = build_preference_matrix(inst);
  for (int j = 0; j < inst.n_users(); ++j) {
    auto col =
        follower_prefix_selection(prefs, st.budgets[j], inst.tasks(), j);
    for (int i = 0; i < inst.n_tasks(); ++i) {
      if (col[i]) {
        st.x(i, j) = 1;
        st.rate_used[j] += inst.tasks()[i].r;
        st.tc[i] += inst.q(i, j);
      }
    }
  }
  return st;
}

namespace detail {

// Payoff of the member contributing `q_j` to a coalition whose total member
// contribution is `tc` (q_j included).
inline double member_payoff(const Task& task, double tc, double q_j,
                            double alpha2) {
  if (tc <= 0.0) return 0.0;
  return coalition_value(task, tc, alpha2) * q_j / tc;
}

// True iff growing the coalition's contribution from `tc` to `tc + q_in`
// leaves no incumbent worse off (within tolerance). Incumbent payoffs scale
// with v(tc)/tc, so it suffices to compare that ratio before and after.
inline bool incumbents_unharmed(const Task& task, double tc, double q_in,
                                double max_member_q, double alpha2) {
  if (tc <= 0.0) return true;  // no incumbents
  double ratio_before = coalition_value(task, tc, alpha2) / tc;
  double ratio_after =
      coalition_value(task, tc + q_in, alpha2) / (tc + q_in);
  if (ratio_after >= ratio_before) return true;
  return max_member_q * (ratio_before - ratio_after) <= kEps;
}

inline double max_member_contribution(const CoalitionState& st,
                                      const Instance& inst, int i,
                                      int exclude = -1) {
  double mx = 0.0;
  for (int j = 0; j < st.n_users(); ++j) {
    if (j != exclude && st.x(i, j)) mx = std::max(mx, inst.q(i, j));
  }
  return mx;
}

}  // namespace detail

// Net payoff user j currently draws from coalition i (member), or would draw
// after joining it (non-member).
inline double member_net_payoff(const CoalitionState& st, const Instance& inst,
                                double alpha2, int i, int j) {
  return detail::member_payoff(inst.tasks()[i], st.tc[i], inst.q(i, j),
                               alpha2) -
         inst.params().rate_charge_scale * inst.tasks()[i].r;
}

inline double join_net_payoff(const CoalitionState& st, const Instance& inst,
                              double alpha2, int q, int j) {
  return detail::member_payoff(inst.tasks()[q], st.tc[q] + inst.q(q, j),
                               inst.q(q, j), alpha2) -
         inst.params().rate_charge_scale * inst.tasks()[q].r;
}

inline double user_utility(const CoalitionState& st, const Instance& inst,
                           double alpha2, int j) {
  double u = 0.0;
  for (int i = 0; i < st.n_tasks(); ++i) {
    if (st.x(i, j)) u += member_net_payoff(st, inst, alpha2, i, j);
  }
  return u;
}

inline double total_user_utility(const CoalitionState& st,
                                 const Instance& inst, double alpha2) {
  double total = 0.0;
  for (int i = 0; i < st.n_tasks(); ++i) {
    total += coalition_value(inst.tasks()[i], st.tc[i], alpha2);
  }
  for (int j = 0; j < st.n_users(); ++j) {
    total -= inst.params().rate_charge_scale * st.rate_used[j];
  }
  return total;
}

enum class TransferBlock { none, not_realizable, not_profitable, not_permitted };

inline std::string to_string(TransferBlock b) {
  switch (b) {
    case TransferBlock::none: return "ok";
    case TransferBlock::not_realizable: return "not-realizable";
    case TransferBlock::not_profitable: return "not-profitable";
    case TransferBlock::not_permitted: return "not-permitted";
  }
  throw std::logic_error("bad block");
}

struct TransferCheck {
  bool feasible = false;
  TransferBlock reason = TransferBlock::none;
  double gain = 0.0;  // net payoff at the target coalition
};

// Moving user j's stake from coalition p to coalition q requires: the swap
// fits the budget, the target pays strictly better than both quitting and
// staying, and no incumbent of the target loses.
inline TransferCheck transfer_feasible(const CoalitionState& st,
                                       const Instance& inst, double alpha2,
                                       int j, int p, int q) {
  if (!st.x(p, j) || st.x(q, j)) {
    throw std::invalid_argument("transfer requires membership in p only");
  }
  TransferCheck out;
  double usage_after =
      st.rate_used[j] - inst.tasks()[p].r + inst.tasks()[q].r;
  if (usage_after > st.budgets[j]) {
    out.reason = TransferBlock::not_realizable;
    return out;
  }
  double gain_q = join_net_payoff(st, inst, alpha2, q, j);
  double stay_p = member_net_payoff(st, inst, alpha2, p, j);
  if (!(gain_q > std::max(0.0, stay_p) + kEps)) {
    out.reason = TransferBlock::not_profitable;
    return out;
  }
  if (!detail::incumbents_unharmed(
          inst.tasks()[q], st.tc[q], inst.q(q, j),
          detail::max_member_contribution(st, inst, q), alpha2)) {
    out.reason = TransferBlock::not_permitted;
    return out;
  }
  out.feasible = true;
  out.gain = gain_q;
  return out;
}

// Leaving is rational when the coalition does not cover its rate charge and
// no transfer out of it would be profitable. Remaining members can only gain
// when someone withdraws; the check is still evaluated and reported.
inline bool quit_feasible(const CoalitionState& st, const Instance& inst,
                          double alpha2, int j, int p,
                          bool* members_unharmed = nullptr) {
  if (!st.x(p, j)) throw std::invalid_argument("quit requires membership");
  double tc_after = st.tc[p] - inst.q(p, j);
  bool unharmed = detail::incumbents_unharmed(
      inst.tasks()[p], tc_after, inst.q(p, j),
      detail::max_member_contribution(st, inst, p, j), alpha2);
  if (members_unharmed != nullptr) *members_unharmed = unharmed;

  if (member_net_payoff(st, inst, alpha2, p, j) > kEps) return false;
  for (int q = 0; q < st.n_tasks(); ++q) {
    if (st.x(q, j) || q == p) continue;
    double gain_q = join_net_payoff(st, inst, alpha2, q, j);
    double stay_p = member_net_payoff(st, inst, alpha2, p, j);
    if (gain_q > std::max(0.0, stay_p) + kEps) return false;
  }
  return unharmed;
}

inline bool join_feasible(const CoalitionState& st, const Instance& inst,
                          double alpha2, int j, int q) {
  if (st.x(q, j)) throw std::invalid_argument("join requires non-membership");
  if (st.rate_used[j] + inst.tasks()[q].r > st.budgets[j]) return false;
  if (!(join_net_payoff(st, inst, alpha2, q, j) > kEps)) return false;
  return detail::incumbents_unharmed(
      inst.tasks()[q], st.tc[q], inst.q(q, j),
      detail::max_member_contribution(st, inst, q), alpha2);
}

struct StabilityCounterexample {
  int user = 0;  // 1-based
  OcfOp op = OcfOp::transfer;
  int from = 0;  // 1-based task ids, 0 = none
  int to = 0;

  std::string describe() const {
    return "user " + std::to_string(user) + " can " + to_string(op) +
           (from ? " from " + std::to_string(from) : std::string()) +
           (to ? " to " + std::to_string(to) : std::string());
  }
};

// A state is stable when no user can execute any operation the formation
// loop would execute: a feasible transfer, a quit from a coalition with
// negative net payoff, or a profitable permitted join.
inline std::optional<StabilityCounterexample> find_instability(
    const CoalitionState& st, const Instance& inst, double alpha2) {
  for (int j = 0; j < st.n_users(); ++j) {
    for (int p = 0; p < st.n_tasks(); ++p) {
      if (!st.x(p, j)) continue;
      if (member_net_payoff(st, inst, alpha2, p, j) < -kEps) {
        return StabilityCounterexample{j + 1, OcfOp::quit, p + 1, 0};
      }
      for (int q = 0; q < st.n_tasks(); ++q) {
        if (q == p || st.x(q, j)) continue;
        if (transfer_feasible(st, inst, alpha2, j, p, q).feasible) {
          return StabilityCounterexample{j + 1, OcfOp::transfer, p + 1, q + 1};
        }
      }
    }
    for (int q = 0; q < st.n_tasks(); ++q) {
      if (!st.x(q, j) && join_feasible(st, inst, alpha2, j, q)) {
        return StabilityCounterexample{j + 1, OcfOp::join, 0, q + 1};
      }
    }
  }
  return std::nullopt;
}

inline bool verify_t_stable(const CoalitionState& st, const Instance& inst,
                            double alpha2) {
  return !find_instability(st, inst, alpha2).has_value();
}

// Worst-case transfer attempts in one iteration: every user sits in half the
// coalitions and tries every (member, outsider) pair once.
inline long worst_case_attempts(long m, long n) {
  long half = (n + 1) / 2;
  return m * half * (n - half);
}

struct SignalingCost {
  long phase1 = 0;
  long per_iteration_worst = 0;
  long settlement = 0;
};

// Message-count model: eta messages to ship a value or a location, mu to
// ship an id.
inline SignalingCost signaling_cost_estimate(long m, long n, long eta = 1,
                                             long mu = 1) {
  SignalingCost c;
  c.phase1 = m * n * eta + m * mu;
  c.per_iteration_worst =
      worst_case_attempts(m, n) * ((m + 1) * eta + (m - 1) * mu);
  c.settlement = 2 * m * n * mu;
  return c;
}

struct OcfOptions {
  long sweep_cap = 10'000;
  long signaling_eta = 1;
  long signaling_mu = 1;
  std::vector<TraceEvent>* trace = nullptr;
};

struct OcfNoConvergence : std::runtime_error {
  OcfNoConvergence(long cap, const OcfDiagnostics& diag)
      : std::runtime_error(
            "coalition formation did not converge within " +
            std::to_string(cap) + " sweeps (" +
            std::to_string(diag.transfers_executed) + " transfers, " +
            std::to_string(diag.quits) + " quits, " +
            std::to_string(diag.joins) + " joins, " +
            std::to_string(diag.transfer_attempts) + " attempts)") {}
};

namespace detail {

struct OcfRunner {
  const Instance& inst;
  double alpha2;
  const OcfOptions& opt;
  CoalitionState st;
  OcfDiagnostics diag;

  OcfRunner(const Instance& inst_, const SubcarrierAssignment& assign,
            double alpha2_, const OcfOptions& opt_)
      : inst(inst_), alpha2(alpha2_), opt(opt_), st(init_ocs(inst_, assign)) {}

  void do_quit(int j, int p) {
    st.x(p, j) = 0;
    st.tc[p] -= inst.q(p, j);
    st.rate_used[j] -= inst.tasks()[p].r;
  }

  void do_join(int j, int q) {
    st.x(q, j) = 1;
    st.tc[q] += inst.q(q, j);
    st.rate_used[j] += inst.tasks()[q].r;
  }

  // Withdrawal never hurts the members left behind; count it if it ever does.
  void check_leave_safety(int j, int p) {
    double tc_after = st.tc[p] - inst.q(p, j);
    if (tc_after <= 0.0) return;
    const Task& task = inst.tasks()[p];
    double before = coalition_value(task, st.tc[p], alpha2) / st.tc[p];
    double after = coalition_value(task, tc_after, alpha2) / tc_after;
    if (after < before - 1e-12) ++diag.safety_violations;
  }

  void emit(OcfOp op, int j, int from, int to, double before, double after) {
    if (opt.trace != nullptr) {
      opt.trace->push_back(TraceEvent{st.iteration, j + 1, op, from, to,
                                      before, after});
    }
  }

  void execute_transfer(int j, int p, int q) {
    double before = user_utility(st, inst, alpha2, j);
    check_leave_safety(j, p);
    do_quit(j, p);
    do_join(j, q);
    ++diag.transfers_executed;
    emit(OcfOp::transfer, j, p + 1, q + 1, before,
         user_utility(st, inst, alpha2, j));
  }

  void execute_quit(int j, int p) {
    double before = user_utility(st, inst, alpha2, j);
    check_leave_safety(j, p);
    do_quit(j, p);
    ++diag.quits;
    emit(OcfOp::quit, j, p + 1, 0, before, user_utility(st, inst, alpha2, j));
  }

  void execute_join(int j, int q) {
    double before = user_utility(st, inst, alpha2, j);
    do_join(j, q);
    ++diag.joins;
    emit(OcfOp::join, j, 0, q + 1, before, user_utility(st, inst, alpha2, j));
  }

  void snapshot_utility() {
    diag.total_user_utility_trace.push_back(
        total_user_utility(st, inst, alpha2));
  }

  // Best feasible transfer out of p, by target net payoff then task id.
  int best_transfer_target(int j, int p, long* attempts = nullptr) {
    int best = -1;
    double best_gain = 0.0;
    for (int q = 0; q < st.n_tasks(); ++q) {
      if (q == p || st.x(q, j)) continue;
      if (attempts != nullptr) ++(*attempts);
      TransferCheck chk = transfer_feasible(st, inst, alpha2, j, p, q);
      if (chk.feasible && (best == -1 || chk.gain > best_gain)) {
        best = q;
        best_gain = chk.gain;
      }
    }
    return best;
  }

  // One pass of the per-coalition bookkeeping step: members whose coalition
  // does not cover its charge first try to move the stake, else leave.
  void quit_or_transfer_pass() {
    for (int j = 0; j < st.n_users(); ++j) {
      for (int i = 0; i < st.n_tasks(); ++i) {
        if (!st.x(i, j)) continue;
        if (member_net_payoff(st, inst, alpha2, i, j) < -kEps) {
          int target = best_transfer_target(j, i);
          if (target >= 0) {
            execute_transfer(j, i, target);
          } else {
            execute_quit(j, i);
          }
        }
      }
      snapshot_utility();
    }
  }

  // Step through user j's transfer options, each (source, target) pair at
  // most once per turn, then scan for joins with whatever budget is left.
  // The attempt budget matches the worst-case complexity bound; anything a
  // capped turn leaves undone is retried on the next sweep.
  void shift_turn(int j, long& attempts_this_sweep) {
    const long attempt_budget = worst_case_attempts(1, st.n_tasks());
    long attempts_this_turn = 0;
    std::set<std::pair<int, int>> tried;
    bool executed = true;
    while (executed && attempts_this_turn < attempt_budget) {
      executed = false;
      std::vector<int> targets;
      for (int q = 0; q < st.n_tasks(); ++q) {
        if (!st.x(q, j)) targets.push_back(q);
      }
      std::vector<double> gain(st.n_tasks(), 0.0);
      for (int q : targets) gain[q] = join_net_payoff(st, inst, alpha2, q, j);
      std::stable_sort(targets.begin(), targets.end(),
                       [&](int a, int b) { return gain[a] > gain[b]; });

      for (int p = 0; p < st.n_tasks() && !executed; ++p) {
        if (!st.x(p, j)) continue;
        if (attempts_this_turn >= attempt_budget) break;
        for (int q : targets) {
          if (attempts_this_turn >= attempt_budget) break;
          if (q == p || !tried.insert({p, q}).second) continue;
          ++diag.transfer_attempts;
          ++attempts_this_sweep;
          ++attempts_this_turn;
          if (transfer_feasible(st, inst, alpha2, j, p, q).feasible) {
            execute_transfer(j, p, q);
            executed = true;
            break;
          }
        }
      }
    }
    for (int q = 0; q < st.n_tasks(); ++q) {
      if (!st.x(q, j) && join_feasible(st, inst, alpha2, j, q)) {
        execute_join(j, q);
      }
    }
    ++st.iteration;
    ++diag.iterations_to_converge;
    snapshot_utility();
  }

  void assert_valid() const {
    for (int j = 0; j < st.n_users(); ++j) {
      double used = 0.0;
      for (int i = 0; i < st.n_tasks(); ++i) {
        if (st.x(i, j)) used += inst.tasks()[i].r;
      }
      if (used > st.budgets[j] * (1.0 + 1e-12) + 1e-9) {
        throw std::logic_error("resource division exceeded a user budget");
      }
    }
  }

  void run() {
    snapshot_utility();
    while (diag.sweeps < opt.sweep_cap) {
      std::vector<std::uint8_t> before = st.x.data();
      quit_or_transfer_pass();
      long attempts_this_sweep = 0;
      for (int j = 0; j < st.n_users(); ++j) {
        shift_turn(j, attempts_this_sweep);
      }
      ++diag.sweeps;
      diag.attempts_per_sweep.push_back(attempts_this_sweep);
      assert_valid();

      int unchanged = 0;
      for (int j = 0; j < st.n_users(); ++j) {
        bool same = true;
        for (int i = 0; i < st.n_tasks(); ++i) {
          if (st.x(i, j) != before[i * st.n_users() + j]) {
            same = false;
            break;
          }
        }
        if (same) ++unchanged;
      }
      if (unchanged == st.n_users()) {
        diag.converged = true;
        break;
      }
    }
    if (!diag.converged) throw OcfNoConvergence(opt.sweep_cap, diag);

    SignalingCost unit_costs = signaling_cost_estimate(
        st.n_users(), st.n_tasks(), opt.signaling_eta, opt.signaling_mu);
    long per_attempt = (st.n_users() + 1) * opt.signaling_eta +
                       (st.n_users() - 1) * opt.signaling_mu;
    diag.messages_estimate = unit_costs.phase1 +
                             diag.transfer_attempts * per_attempt +
                             unit_costs.settlement;
  }
};

}  // namespace detail

inline UtilityReport make_coop_report(const Instance& inst,
                                      const ParticipationMatrix& x,
                                      double alpha2) {
  const auto& p = inst.params();
  UtilityReport rep;
  rep.pfm = platform_performance(inst.tasks(), inst.q, x);
  rep.platform_utility =
      utility_coop_platform(p, inst.tasks(), inst.q, x, alpha2);
  PayoffDistribution payoffs =
      payoff_distribution(inst.tasks(), inst.q, x, alpha2);
  rep.per_user_utility.resize(inst.n_users());
  for (int j = 0; j < inst.n_users(); ++j) {
    rep.per_user_utility[j] =
        utility_coop_user(p, inst.tasks(), payoffs, x, j);
  }
  rep.incentive_cost = alpha2 * rep.pfm;
  rep.bs_revenue_split =
      p.revenue_split * total_rate_charges(p, inst.tasks(), x);
  rep.seed = p.rng_seed;
  return rep;
}

// Full coalition-formation run on a fixed subcarrier assignment: initial
// prefix strategies, then repeated quit/transfer/join sweeps until no user
// changes strategy.
inline std::pair<MechanismOutcome, OcfDiagnostics> run_ocf(
    const Instance& inst, const SubcarrierAssignment& assign, double alpha2,
    Mode mode = Mode::ocf_random, const OcfOptions& opt = {}) {
  detail::OcfRunner runner(inst, assign, alpha2, opt);
  runner.run();

  MechanismOutcome out;
  out.mode = mode;
  out.seed = inst.params().rng_seed;
  out.params = inst.params();
  out.n_tasks = inst.n_tasks();
  out.n_users = inst.n_users();
  out.alpha = alpha2;
  out.assignment = assign;
  out.participation = runner.st.x;
  out.report = make_coop_report(inst, runner.st.x, alpha2);
  out.ocf = runner.diag;
  return {out, runner.diag};
}

// Rebuild a CoalitionState from a finished outcome, e.g. to re-verify
// stability of a serialized result.
inline CoalitionState state_from_outcome(const Instance& inst,
                                         const MechanismOutcome& o) {
  CoalitionState st;
  st.budgets = user_budgets(inst.caps, o.assignment);
  st.x = o.participation;
  st.rate_used.assign(inst.n_users(), 0.0);
  st.tc.assign(inst.n_tasks(), 0.0);
  for (int i = 0; i < inst.n_tasks(); ++i) {
    for (int j = 0; j < inst.n_users(); ++j) {
      if (st.x(i, j)) {
        st.rate_used[j] += inst.tasks()[i].r;
        st.tc[i] += inst.q(i, j);
      }
    }
  }
  return st;
}

}  // namespace mcs

#endif  // MCS_OCF_HPP
