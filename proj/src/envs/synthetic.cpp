#include "ncs/envs/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncs/errors.hpp"
#include "ncs/rng.hpp"

namespace ncs {

namespace {
constexpr double kOffset = 0.5;
constexpr double kMaxRadius = 0.8;
constexpr double kRewardScale = 0.6;
}  // namespace

void SyntheticConfig::validate() const {
  if (n_actions < 2) throw ConfigError("synthetic.n_actions must be >= 2", "synthetic.n_actions");
  if (horizon < 1) throw ConfigError("synthetic horizon must be >= 1", "synthetic.horizon");
  if (near_actions >= n_actions) {
    throw ConfigError("synthetic near_actions must be < n_actions", "synthetic.near_actions");
  }
  if (!(near_radius > 0.0 && near_radius < kMaxRadius)) {
    throw ConfigError("synthetic near_radius must lie in (0, 0.8)", "synthetic.near_radius");
  }
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("env.tau must lie in (0, 1]", "env.tau");
  if (!(sigma >= 0.0)) throw ConfigError("env.sigma must be nonnegative", "env.sigma");
}

SyntheticLinearEnv::SyntheticLinearEnv(SyntheticConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  RandomStream rng(cfg_.instance_seed);
  const double pi = std::numbers::pi;
  const double cost_dir = 2.0 * pi * rng.uniform();
  // Reward direction 45 to 90 degrees away from the cost direction, so the
  // best safe action usually sits on the constraint boundary.
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const double reward_dir = cost_dir + sign * pi * (0.25 + 0.25 * rng.uniform());
  theta_ = Vec(3);
  theta_ << 1.0, kRewardScale * std::cos(reward_dir), kRewardScale * std::sin(reward_dir);
  gamma_ = Vec(3);
  gamma_ << 0.0, std::cos(cost_dir), std::sin(cost_dir);

  table_.resize(cfg_.horizon);
  for (auto& actions : table_) {
    actions.reserve(cfg_.n_actions);
    Vec base(3);
    base << kOffset, 0.0, 0.0;
    actions.push_back(base);
    for (std::size_t a = 1; a < cfg_.n_actions; ++a) {
      const bool near = a <= cfg_.near_actions;
      const double lo = near ? 0.25 * cfg_.near_radius : cfg_.near_radius;
      const double hi = near ? cfg_.near_radius : kMaxRadius;
      const double r = lo + (hi - lo) * rng.uniform();
      const double angle = cost_dir + pi * (rng.uniform() - 0.5);  // cost >= 0
      Vec phi(3);
      phi << kOffset, r * std::cos(angle), r * std::sin(angle);
      actions.push_back(phi);
    }
  }

  desc_.name = "synthetic-linear";
  desc_.d = 3;
  desc_.horizon = cfg_.horizon;
  desc_.num_actions = cfg_.n_actions;
  desc_.num_constraints = 1;
  desc_.tau = cfg_.tau;
  desc_.sigma = cfg_.sigma;
  desc_.feature_norm_bound = 1.0;
  desc_.deterministic = true;
}

State SyntheticLinearEnv::initial_state() const {
  State s;
  s.v[0] = 1.0;
  return s;
}

std::size_t SyntheticLinearEnv::step_of(const State& s) const {
  const auto h = static_cast<std::size_t>(std::llround(s.v[0]));
  if (h < 1 || h > cfg_.horizon + 1) throw InputError("synthetic state out of range");
  // The terminal state reuses the last table; it is never acted in.
  return std::min(h, cfg_.horizon);
}

void SyntheticLinearEnv::feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const {
  check_action(a);
  out = table_[step_of(s) - 1][a];
}

std::vector<double> SyntheticLinearEnv::action_point(ActionId a) const {
  check_action(a);
  return {static_cast<double>(a)};
}

State SyntheticLinearEnv::transition(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  State next;
  next.v[0] = static_cast<double>(std::llround(s.v[0]) + 1);
  return next;
}

double SyntheticLinearEnv::true_reward(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  return table_[step_of(s) - 1][a].dot(theta_);
}

CostVector SyntheticLinearEnv::true_costs(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  CostVector c;
  c.push(table_[step_of(s) - 1][a].dot(gamma_));
  return c;
}

SimOracle SyntheticLinearEnv::oracle() const {
  SimOracle o;
  for (std::size_t h = 0; h < cfg_.horizon; ++h) {
    o.theta_star.push_back(theta_);
    o.gamma_star.push_back({gamma_});
  }
  return o;
}

}  // namespace ncs
