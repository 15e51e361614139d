#pragma once

#include <cstddef>
#include <vector>

#include "ncs/mdp.hpp"

namespace ncs {

struct ToyCoveringConfig {
  std::size_t n_states = 3;
  double tau = 2.0 / 3.0;
  double action_step = 1.0 / 96.0;
  /// Cost slope used by the interactive env is 1 / gamma_index.
  std::size_t gamma_index = 0;  // 0 means n_states
  double sigma = 0.01;

  void validate() const;
};

/// Supremum of a over ([0, 1/3] u [2/3, 1]) subject to gamma * s * a <= tau.
/// Throws InputError for s < 1.
double toy_value(double gamma, std::size_t s, double tau);

struct ValueFunction {
  double gamma = 0.0;
  std::vector<double> values;  // values[s-1] for s = 1..n_states
};

/// V_gamma for gamma in {1/i : i = 1..n_states}.
std::vector<ValueFunction> toy_value_class(std::size_t n_states, double tau);

double sup_distance(const ValueFunction& a, const ValueFunction& b);

struct PackingResult {
  std::size_t count = 0;
  std::vector<std::size_t> members;  // indices into the input list
  double min_separation = 0.0;       // over member pairs; +inf for < 2 members
};

/// Greedy 2*kappa-packing; its size lower-bounds the kappa-covering number.
/// Throws InputError unless 0 < kappa < 1/6.
PackingResult greedy_packing(const std::vector<ValueFunction>& functions, double kappa);
std::size_t covering_lower_bound(const std::vector<ValueFunction>& functions, double kappa);

/// Interactive chain over states 1..n played for n steps (s_h = h). One
/// scalar action a in the two bands, reward a, cost gamma * s * a.
///
/// Features phi = (a, s a / n) / sqrt(2). Costs and the threshold are both
/// divided by n so that costs stay in [0, 1]; the feasible sets are the
/// same as in the unscaled class.
class ToyCoveringEnv final : public SimulatedEnvironment {
 public:
  explicit ToyCoveringEnv(ToyCoveringConfig cfg);

  const EnvDescriptor& descriptor() const override { return desc_; }
  State initial_state() const override;
  void feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const override;
  ActionId safe_baseline(const State&, std::size_t) const override { return 0; }
  std::vector<double> action_point(ActionId a) const override;

  State transition(const State& s, ActionId a, std::size_t h) const override;
  double true_reward(const State& s, ActionId a, std::size_t h) const override;
  CostVector true_costs(const State& s, ActionId a, std::size_t h) const override;
  SimOracle oracle() const override;

  double action_value(ActionId a) const { return actions_.at(a); }
  double gamma() const noexcept { return gamma_; }
  const ToyCoveringConfig& config() const noexcept { return cfg_; }

 private:
  std::size_t state_index(const State& s) const;

  ToyCoveringConfig cfg_;
  EnvDescriptor desc_;
  std::vector<double> actions_;
  double gamma_;
};

}  // namespace ncs
