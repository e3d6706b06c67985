#ifndef MCS_SCENARIO_HPP
#define MCS_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcs/geometry.hpp"
#include "mcs/matrix.hpp"
#include "mcs/rng.hpp"

namespace mcs {

// Distances shorter than this (km) are clamped before being raised to a
// negative power, so coincident points cannot blow up path loss or
// contribution values.
inline constexpr double kMinDistanceKm = 0.01;

// Tolerance for all floating-point gates on discrete decisions (profitable,
// permitted, quit). Keeps tie-ish comparisons from oscillating.
inline constexpr double kEps = 1e-9;

struct Task {
  int id = 0;        // 1-based
  Point location;    // km
  double a = 0.0;    // contribution scale
  double d0 = 0.0;   // area-of-interest radius, km
  double r = 0.0;    // required feedback rate, b/s
  double rho = 0.0;  // contribution saturation threshold
  double phi = 0.0;  // performance upper bound

  friend bool operator==(const Task&, const Task&) = default;
};

struct User {
  int id = 0;      // 1-based
  Point location;  // km
  double distance_to_bs = 0.0;
  std::vector<double> distances_to_tasks;

  friend bool operator==(const User&, const User&) = default;
};

struct GlobalParams {
  double side_length = 10.0;          // L, km
  int n_subcarriers = 60;             // K
  double bandwidth = 15e3;            // B, Hz per subcarrier
  double tx_power = 0.2;              // P, W (23 dBm)
  double noise_variance = 1e-12;      // sigma_n^2, W (-90 dBm)
  double path_loss_exponent = 3.0;    // delta
  double contribution_exponent = 0.8; // lambda
  // Charge per b/s of feedback rate. The headline value is 7 per Mb/s; rates
  // are stored in b/s, hence the 1e-6.
  double rate_charge_scale = 7e-6;    // beta
  double revenue_split = 0.2;         // gamma, platform share of BS revenue
  double incentive_alpha1 = 1.0;      // reward per unit contribution
  double incentive_alpha2 = 1.0;      // reward per unit task performance
  double rate_unit = 10e3;            // b/s per nominal rate unit
  std::uint64_t rng_seed = 1;

  friend bool operator==(const GlobalParams&, const GlobalParams&) = default;
};

inline void validate(const GlobalParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw std::invalid_argument(std::string(name) + " must be positive");
    }
  };
  positive(p.side_length, "side_length");
  positive(static_cast<double>(p.n_subcarriers), "n_subcarriers");
  positive(p.bandwidth, "bandwidth");
  positive(p.tx_power, "tx_power");
  positive(p.noise_variance, "noise_variance");
  positive(p.path_loss_exponent, "path_loss_exponent");
  positive(p.contribution_exponent, "contribution_exponent");
  positive(p.rate_charge_scale, "rate_charge_scale");
  positive(p.revenue_split, "revenue_split");
  positive(p.rate_unit, "rate_unit");
  if (p.incentive_alpha1 < 0.0 || p.incentive_alpha2 < 0.0) {
    throw std::invalid_argument("incentive intensities must be >= 0");
  }
}

// One immutable problem instance: tasks, users, channel gains, constants.
struct Scenario {
  GlobalParams params;
  std::vector<Task> tasks;
  std::vector<User> users;
  Matrix<double> channel_gains;  // K x M, |h_{k,j}|^2

  int n_tasks() const { return static_cast<int>(tasks.size()); }
  int n_users() const { return static_cast<int>(users.size()); }
  Point bs_location() const {
    return {params.side_length / 2.0, params.side_length / 2.0};
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Draw order is fixed so that a seed pins the whole instance: tasks first
// (location x, y, then a, d0, r, rho, phi per task), then user locations,
// then channel gains row-major (subcarrier-major).
inline Scenario generate_scenario(const GlobalParams& params, int n_tasks,
                                  int n_users) {
  validate(params);
  if (n_tasks < 1 || n_users < 1) {
    throw std::invalid_argument("need at least one task and one user");
  }

  Scenario s;
  s.params = params;
  Rng rng(params.rng_seed);
  const double L = params.side_length;

  s.tasks.resize(n_tasks);
  for (int i = 0; i < n_tasks; ++i) {
    Task& t = s.tasks[i];
    t.id = i + 1;
    t.location = {rng.uniform(0.0, L), rng.uniform(0.0, L)};
    t.a = rng.uniform(3.0, 7.0);
    t.d0 = rng.uniform(0.6, 2.5);
    t.r = rng.uniform(6.0, 12.0) * params.rate_unit;
    t.rho = rng.uniform(35.0, 60.0);
    t.phi = rng.uniform(90.0, 150.0);
  }

  const Point bs = s.bs_location();
  s.users.resize(n_users);
  for (int j = 0; j < n_users; ++j) {
    User& u = s.users[j];
    u.id = j + 1;
    u.location = {rng.uniform(0.0, L), rng.uniform(0.0, L)};
    u.distance_to_bs = distance(u.location, bs);
    u.distances_to_tasks.resize(n_tasks);
    for (int i = 0; i < n_tasks; ++i) {
      u.distances_to_tasks[i] = distance(u.location, s.tasks[i].location);
    }
  }

  s.channel_gains = Matrix<double>(params.n_subcarriers, n_users);
  for (int k = 0; k < params.n_subcarriers; ++k) {
    for (int j = 0; j < n_users; ++j) {
      double d = std::max(s.users[j].distance_to_bs, kMinDistanceKm);
      double mean = std::pow(d, -params.path_loss_exponent);
      s.channel_gains(k, j) = rng.exponential(mean);
    }
  }
  return s;
}

// --- JSON serialization (schema "mcs.scenario/1") ---------------------------

inline void to_json(nlohmann::json& j, const Point& p) {
  j = nlohmann::json::array({p.x, p.y});
}
inline void from_json(const nlohmann::json& j, Point& p) {
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Task, id, location, a, d0, r, rho, phi)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(User, id, location, distance_to_bs,
                                   distances_to_tasks)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(
    GlobalParams, side_length, n_subcarriers, bandwidth, tx_power,
    noise_variance, path_loss_exponent, contribution_exponent,
    rate_charge_scale, revenue_split, incentive_alpha1, incentive_alpha2,
    rate_unit, rng_seed)

inline void to_json(nlohmann::json& j, const Scenario& s) {
  nlohmann::json gains = nlohmann::json::array();
  for (std::size_t k = 0; k < s.channel_gains.rows(); ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t m = 0; m < s.channel_gains.cols(); ++m) {
      row.push_back(s.channel_gains(k, m));
    }
    gains.push_back(std::move(row));
  }
  j = nlohmann::json{{"schema", "mcs.scenario/1"},
                     {"params", s.params},
                     {"tasks", s.tasks},
                     {"users", s.users},
                     {"channel_gains", std::move(gains)}};
}

inline void from_json(const nlohmann::json& j, Scenario& s) {
  if (j.at("schema").get<std::string>() != "mcs.scenario/1") {
    throw std::invalid_argument("unsupported scenario schema");
  }
  s.params = j.at("params").get<GlobalParams>();
  s.tasks = j.at("tasks").get<std::vector<Task>>();
  s.users = j.at("users").get<std::vector<User>>();
  const auto& gains = j.at("channel_gains");
  s.channel_gains =
      Matrix<double>(gains.size(), gains.empty() ? 0 : gains.at(0).size());
  for (std::size_t k = 0; k < s.channel_gains.rows(); ++k) {
    for (std::size_t m = 0; m < s.channel_gains.cols(); ++m) {
      double g = gains.at(k).at(m).get<double>();
      if (!(g > 0.0)) throw std::invalid_argument("channel gain must be > 0");
      s.channel_gains(k, m) = g;
    }
  }
  // Stored derived distances must agree with the stored locations.
  const Point bs = s.bs_location();
  for (const User& u : s.users) {
    if (std::abs(u.distance_to_bs - distance(u.location, bs)) > 1e-9) {
      throw std::invalid_argument("inconsistent distance_to_bs");
    }
    if (u.distances_to_tasks.size() != s.tasks.size()) {
      throw std::invalid_argument("bad distances_to_tasks length");
    }
    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
      if (std::abs(u.distances_to_tasks[i] -
                   distance(u.location, s.tasks[i].location)) > 1e-9) {
        throw std::invalid_argument("inconsistent task distance");
      }
    }
  }
}

}  // namespace mcs

#endif  // MCS_SCENARIO_HPP
