#ifndef MCS_KNAPSACK_HPP
#define MCS_KNAPSACK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mcs::knapsack {

struct Result {
  std::vector<std::uint8_t> take;  // one flag per input item
  double value = 0.0;
  long nodes = 0;
  bool exact = true;
};

struct BudgetExceeded : std::runtime_error {
  BudgetExceeded() : std::runtime_error("knapsack node budget exceeded") {}
};

// 0-1 knapsack, exact branch and bound with the fractional relaxation as
// upper bound. Items with non-positive value can never be part of an optimal
// selection and are skipped outright. Throws BudgetExceeded if the search
// would need more than node_budget nodes.
inline Result solve_exact(const std::vector<double>& values,
                          const std::vector<double>& weights, double capacity,
                          long node_budget = 4'000'000) {
  const std::size_t n = values.size();
  Result res;
  res.take.assign(n, 0);

  std::vector<int> items;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] > 0.0 && weights[i] <= capacity) {
      items.push_back(static_cast<int>(i));
    }
  }
  std::sort(items.begin(), items.end(), [&](int a, int b) {
    double da = values[a] / weights[a];
    double db = values[b] / weights[b];
    if (da != db) return da > db;
    return a < b;
  });

  const std::size_t m = items.size();
  std::vector<std::uint8_t> current(m, 0), best_sel(m, 0);
  double best = 0.0;
  long nodes = 0;

  // Fractional upper bound for the tail starting at position `pos`.
  auto bound = [&](std::size_t pos, double cap) {
    double b = 0.0;
    for (std::size_t t = pos; t < m; ++t) {
      int it = items[t];
      if (weights[it] <= cap) {
        b += values[it];
        cap -= weights[it];
      } else {
        b += values[it] * cap / weights[it];
        break;
      }
    }
    return b;
  };

  auto dfs = [&](auto&& self, std::size_t pos, double value,
                 double cap) -> void {
    if (++nodes > node_budget) throw BudgetExceeded{};
    if (value > best) {
      best = value;
      std::copy(current.begin(), current.begin() + pos, best_sel.begin());
      std::fill(best_sel.begin() + pos, best_sel.end(), 0);
    }
    if (pos == m) return;
    if (value + bound(pos, cap) <= best + 1e-12) return;
    int it = items[pos];
    if (weights[it] <= cap) {
      current[pos] = 1;
      self(self, pos + 1, value + values[it], cap - weights[it]);
    }
    current[pos] = 0;
    self(self, pos + 1, value, cap);
  };
  dfs(dfs, 0, 0.0, capacity);

  for (std::size_t t = 0; t < m; ++t) {
    if (best_sel[t]) res.take[items[t]] = 1;
  }
  res.value = best;
  res.nodes = nodes;
  return res;
}

// Dynamic program on rates rounded up to an integer grid. Any selection it
// returns is feasible for the original capacities; the value can be slightly
// conservative when rounding excludes a knife-edge fit.
inline Result solve_scaled_dp(const std::vector<double>& values,
                              const std::vector<double>& weights,
                              double capacity, int grid = 20000) {
  const std::size_t n = values.size();
  Result res;
  res.take.assign(n, 0);
  res.exact = false;

  double max_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] > 0.0) max_w = std::max(max_w, weights[i]);
  }
  if (max_w == 0.0 || capacity <= 0.0) return res;
  double unit = std::max(capacity, max_w) / grid;
  int cap_int = static_cast<int>(std::floor(capacity / unit));

  std::vector<double> table(cap_int + 1, 0.0);
  std::vector<std::vector<std::uint8_t>> choice(
      n, std::vector<std::uint8_t>(cap_int + 1, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] <= 0.0) continue;
    int w = static_cast<int>(std::ceil(weights[i] / unit));
    if (w > cap_int) continue;
    for (int c = cap_int; c >= w; --c) {
      if (table[c - w] + values[i] > table[c]) {
        table[c] = table[c - w] + values[i];
        choice[i][c] = 1;
      }
    }
  }
  int c = cap_int;
  for (std::size_t i = n; i-- > 0;) {
    if (values[i] <= 0.0) continue;
    if (choice[i][c]) {
      res.take[i] = 1;
      c -= static_cast<int>(std::ceil(weights[i] / unit));
    }
  }
  res.value = table[cap_int];
  return res;
}

}  // namespace mcs::knapsack

#endif  // MCS_KNAPSACK_HPP
