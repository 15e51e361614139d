#include "ncs/envs/toy_covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncs/errors.hpp"

namespace ncs {

void ToyCoveringConfig::validate() const {
  if (n_states < 1) throw ConfigError("toy.n_states must be >= 1", "toy.n_states");
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("toy tau must lie in (0, 1)", "env.tau");
  if (!(action_step > 0.0 && action_step <= 1.0 / 3.0)) {
    throw ConfigError("toy action step must lie in (0, 1/3]", "toy.action_step");
  }
  if (gamma_index > n_states) {
    throw ConfigError("toy.gamma_index must be in [0, n_states]", "toy.gamma_index");
  }
  if (!(sigma >= 0.0)) throw ConfigError("env.sigma must be nonnegative", "env.sigma");
}

double toy_value(double gamma, std::size_t s, double tau) {
  if (s < 1) throw InputError("toy_value: state must be >= 1");
  const double load = gamma * static_cast<double>(s);
  if (load <= 0.0) return 1.0;
  const double u = tau / load;
  if (u >= 1.0) return 1.0;
  if (u >= 2.0 / 3.0) return u;
  if (u >= 1.0 / 3.0) return 1.0 / 3.0;
  return u;
}

std::vector<ValueFunction> toy_value_class(std::size_t n_states, double tau) {
  std::vector<ValueFunction> out;
  out.reserve(n_states);
  for (std::size_t i = 1; i <= n_states; ++i) {
    ValueFunction f;
    f.gamma = 1.0 / static_cast<double>(i);
    for (std::size_t s = 1; s <= n_states; ++s) f.values.push_back(toy_value(f.gamma, s, tau));
    out.push_back(std::move(f));
  }
  return out;
}

double sup_distance(const ValueFunction& a, const ValueFunction& b) {
  if (a.values.size() != b.values.size()) throw InputError("value maps differ in domain size");
  double d = 0.0;
  for (std::size_t s = 0; s < a.values.size(); ++s) {
    d = std::max(d, std::abs(a.values[s] - b.values[s]));
  }
  return d;
}

PackingResult greedy_packing(const std::vector<ValueFunction>& functions, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0 / 6.0)) throw InputError("kappa must lie in (0, 1/6)");
  PackingResult r;
  r.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < functions.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t m : r.members) nearest = std::min(nearest, sup_distance(functions[i], functions[m]));
    if (nearest > 2.0 * kappa) {
      r.members.push_back(i);
      r.min_separation = std::min(r.min_separation, nearest);
    }
  }
  r.count = r.members.size();
  return r;
}

std::size_t covering_lower_bound(const std::vector<ValueFunction>& functions, double kappa) {
  return greedy_packing(functions, kappa).count;
}

ToyCoveringEnv::ToyCoveringEnv(ToyCoveringConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto per_band = static_cast<long>(std::floor((1.0 / 3.0) / cfg_.action_step + 1e-9));
  for (long i = 0; i <= per_band; ++i) actions_.push_back(static_cast<double>(i) * cfg_.action_step);
  for (long i = per_band; i >= 0; --i) actions_.push_back(1.0 - static_cast<double>(i) * cfg_.action_step);
  const std::size_t idx = cfg_.gamma_index == 0 ? cfg_.n_states : cfg_.gamma_index;
  gamma_ = 1.0 / static_cast<double>(idx);
  const double n = static_cast<double>(cfg_.n_states);
  desc_.name = "toy-covering";
  desc_.d = 2;
  desc_.horizon = cfg_.n_states;
  desc_.num_actions = actions_.size();
  desc_.num_constraints = 1;
  desc_.tau = cfg_.tau / n;
  desc_.sigma = cfg_.sigma;
  desc_.feature_norm_bound = 1.0;
  desc_.deterministic = true;
}

State ToyCoveringEnv::initial_state() const {
  State s;
  s.v[0] = 1.0;
  return s;
}

std::size_t ToyCoveringEnv::state_index(const State& s) const {
  const double x = s.v[0];
  const auto i = static_cast<std::size_t>(std::llround(x));
  if (!(x >= 1.0) || i < 1 || i > cfg_.n_states + 1) throw InputError("toy state out of range");
  return i;
}

std::vector<double> ToyCoveringEnv::action_point(ActionId a) const {
  check_action(a);
  return {actions_[a]};
}

void ToyCoveringEnv::feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const {
  check_action(a);
  const double n = static_cast<double>(cfg_.n_states);
  const double x = actions_[a];
  const double load = static_cast<double>(state_index(s)) / n;
  out << x / std::sqrt(2.0), load * x / std::sqrt(2.0);
}

State ToyCoveringEnv::transition(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  State next;
  next.v[0] = static_cast<double>(state_index(s) + 1);
  return next;
}

double ToyCoveringEnv::true_reward(const State&, ActionId a, std::size_t) const {
  check_action(a);
  return actions_[a];
}

CostVector ToyCoveringEnv::true_costs(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  const double n = static_cast<double>(cfg_.n_states);
  CostVector c;
  c.push(gamma_ * static_cast<double>(state_index(s)) * actions_[a] / n);
  return c;
}

SimOracle ToyCoveringEnv::oracle() const {
  Vec theta(2), gamma(2);
  theta << std::sqrt(2.0), 0.0;
  gamma << 0.0, std::sqrt(2.0) * gamma_;
  SimOracle o;
  for (std::size_t h = 0; h < desc_.horizon; ++h) {
    o.theta_star.push_back(theta);
    o.gamma_star.push_back({gamma});
  }
  return o;
}

}  // namespace ncs
