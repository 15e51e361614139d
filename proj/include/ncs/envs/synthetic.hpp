#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ncs/mdp.hpp"

namespace ncs {

struct SyntheticConfig {
  std::size_t n_actions = 10;
  std::size_t horizon = 2;
  std::uint64_t instance_seed = 7;
  double tau = 0.4;
  double sigma = 0.01;
  /// Number of non-baseline actions placed inside the exploration radius.
  std::size_t near_actions = 3;
  double near_radius = 0.2;

  void validate() const;
};

/// Small random linear MDP with d = 3 and a deterministic chain s_1 -> ... -> s_H.
///
/// Each step has its own action table phi = (0.5, p, q) with |(p, q)| <= 0.8
/// and cost <(p, q), u> >= 0 for a unit direction u; action 0 is the baseline
/// (0.5, 0, 0). Reward direction and cost direction are drawn per instance.
class SyntheticLinearEnv final : public SimulatedEnvironment {
 public:
  explicit SyntheticLinearEnv(SyntheticConfig cfg);

  const EnvDescriptor& descriptor() const override { return desc_; }
  State initial_state() const override;
  void feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const override;
  ActionId safe_baseline(const State&, std::size_t) const override { return 0; }
  std::vector<double> action_point(ActionId a) const override;

  State transition(const State& s, ActionId a, std::size_t h) const override;
  double true_reward(const State& s, ActionId a, std::size_t h) const override;
  CostVector true_costs(const State& s, ActionId a, std::size_t h) const override;
  SimOracle oracle() const override;

 private:
  std::size_t step_of(const State& s) const;

  SyntheticConfig cfg_;
  EnvDescriptor desc_;
  std::vector<std::vector<Vec>> table_;  // [h-1][a]
  Vec theta_;
  Vec gamma_;
};

}  // namespace ncs
