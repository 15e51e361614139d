#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ncs/linalg.hpp"
#include "ncs/rng.hpp"

namespace ncs {

/// Environment state. Every shipped environment fits in four coordinates;
/// discrete environments store their state index in v[0].
struct State {
  std::array<double, 4> v{};

  friend bool operator==(const State&, const State&) = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept;
};

using ActionId = std::size_t;

/// Per-step costs, one entry per constraint side (two-sided constraints use two).
struct CostVector {
  static constexpr std::size_t kMaxSides = 2;
  std::array<double, kMaxSides> values{};
  std::size_t size = 0;

  double operator[](std::size_t i) const { return values[i]; }
  double max() const;
  void push(double c);
};

struct EnvDescriptor {
  std::string name;
  std::size_t d = 0;
  std::size_t horizon = 0;
  std::size_t num_actions = 0;
  std::size_t num_constraints = 1;
  double tau = 0.0;
  double sigma = 0.0;
  double feature_norm_bound = 1.0;
  bool deterministic = true;
};

struct StepOutcome {
  State next_state;
  double noisy_reward = 0.0;
  CostVector noisy_costs;
  // Oracle channel: logged by the harness, never read by the agent.
  double true_reward = 0.0;
  CostVector true_costs;
};

/// Ground-truth parameters: r_h = <phi, theta_star[h-1]>,
/// c_h^side = <phi, gamma_star[h-1][side]>.
struct SimOracle {
  std::vector<Vec> theta_star;
  std::vector<std::vector<Vec>> gamma_star;
};

/// What the learner may touch: features, the baseline safe action, the known
/// admissibility mask over the action set, and noisy interaction.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvDescriptor& descriptor() const = 0;
  virtual State initial_state() const = 0;

  /// Writes phi(s, a) into out (size d). Throws InputError for a >= num_actions.
  virtual void feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const = 0;
  Vec feature(const State& s, ActionId a) const;

  virtual ActionId safe_baseline(const State& s, std::size_t h) const = 0;

  /// Actions removed a priori by a known module (e.g. a collision-avoidance
  /// mask). Defaults to everything admissible.
  virtual bool admissible(const State& s, std::size_t h, ActionId a) const;

  /// Coordinates of action a in the action space.
  virtual std::vector<double> action_point(ActionId a) const = 0;

  /// Throws InputError when h is outside [1, H] or a is not an action.
  virtual StepOutcome step(const State& s, ActionId a, std::size_t h, RandomStream& rng) const = 0;
};

/// Noise-free dynamics and payoffs. Only the metrics layer and validators use this.
class GroundTruth {
 public:
  virtual ~GroundTruth() = default;

  virtual State transition(const State& s, ActionId a, std::size_t h) const = 0;
  virtual double true_reward(const State& s, ActionId a, std::size_t h) const = 0;
  virtual CostVector true_costs(const State& s, ActionId a, std::size_t h) const = 0;
  virtual SimOracle oracle() const = 0;
};

/// Simulator: deterministic ground truth plus truncated-Gaussian observation
/// noise of scale sigma on every reward and cost channel.
class SimulatedEnvironment : public Environment, public GroundTruth {
 public:
  StepOutcome step(const State& s, ActionId a, std::size_t h, RandomStream& rng) const override;

  /// True iff every side's true cost is within tau (+1e-12) and a is admissible.
  bool truly_safe(const State& s, ActionId a, std::size_t h) const;

 protected:
  void check_action(ActionId a) const;
  void check_step(std::size_t h) const;
};

struct ValidationReport {
  std::size_t samples = 0;
  double max_feature_norm = 0.0;
  std::size_t feature_norm_violations = 0;
  std::size_t reward_out_of_range = 0;
  std::size_t cost_out_of_range = 0;
  std::size_t baseline_nonzero_cost = 0;
  std::size_t baseline_not_admissible = 0;
  // Local-ball check: every action with 0 < |phi(s,a) - phi(s,a0)| <= epsilon
  // must be admissible and lane feasible.
  std::size_t ball_states_checked = 0;
  std::size_t ball_lane_infeasible_states = 0;
  std::size_t ball_mask_infeasible_states = 0;
  std::size_t ball_mask_infeasible_first_step = 0;
  std::size_t ball_empty_states = 0;
  std::vector<std::string> messages;

  bool feature_bound_ok() const { return feature_norm_violations == 0; }
  bool ranges_ok() const { return reward_out_of_range == 0 && cost_out_of_range == 0; }
  bool baseline_ok() const { return baseline_nonzero_cost == 0 && baseline_not_admissible == 0; }
  bool local_ball_ok() const {
    return ball_lane_infeasible_states == 0 && ball_mask_infeasible_states == 0;
  }
  bool ok() const { return feature_bound_ok() && ranges_ok() && baseline_ok() && local_ball_ok(); }
  std::string summary() const;
};

/// Statistical spot-check of the structural assumptions on states reachable
/// from s1 under uniformly random truly-safe play.
ValidationReport validate_assumptions(const SimulatedEnvironment& env, std::size_t n_samples,
                                      double epsilon, RandomStream& rng);

}  // namespace ncs
