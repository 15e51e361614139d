#include "ncs/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "ncs/errors.hpp"

namespace ncs {

namespace {
constexpr double kCostTolerance = 1e-12;
constexpr double kBaselineTolerance = 1e-10;
constexpr std::size_t kMaxMessages = 8;
}  // namespace

std::size_t StateHash::operator()(const State& s) const noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (double x : s.v) {
    if (x == 0.0) x = 0.0;  // fold -0.0
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return static_cast<std::size_t>(h);
}

double CostVector::max() const {
  double m = -INFINITY;
  for (std::size_t i = 0; i < size; ++i) m = std::max(m, values[i]);
  return m;
}

void CostVector::push(double c) {
  if (size == kMaxSides) throw InputError("CostVector: too many constraint sides");
  values[size++] = c;
}

Vec Environment::feature(const State& s, ActionId a) const {
  Vec out(static_cast<Eigen::Index>(descriptor().d));
  feature_into(s, a, out);
  return out;
}

bool Environment::admissible(const State&, std::size_t, ActionId) const { return true; }

void SimulatedEnvironment::check_action(ActionId a) const {
  if (a >= descriptor().num_actions) {
    throw InputError("action " + std::to_string(a) + " is not in the action set of " +
                     descriptor().name);
  }
}

void SimulatedEnvironment::check_step(std::size_t h) const {
  if (h < 1 || h > descriptor().horizon) {
    throw InputError("step index " + std::to_string(h) + " outside [1, " +
                     std::to_string(descriptor().horizon) + "]");
  }
}

StepOutcome SimulatedEnvironment::step(const State& s, ActionId a, std::size_t h,
                                       RandomStream& rng) const {
  check_step(h);
  check_action(a);
  const double sigma = descriptor().sigma;
  StepOutcome out;
  out.next_state = transition(s, a, h);
  out.true_reward = true_reward(s, a, h);
  out.true_costs = true_costs(s, a, h);
  out.noisy_reward = out.true_reward + rng.truncated_gaussian(sigma);
  out.noisy_costs.size = out.true_costs.size;
  for (std::size_t i = 0; i < out.true_costs.size; ++i) {
    out.noisy_costs.values[i] = out.true_costs.values[i] + rng.truncated_gaussian(sigma);
  }
  return out;
}

bool SimulatedEnvironment::truly_safe(const State& s, ActionId a, std::size_t h) const {
  if (!admissible(s, h, a)) return false;
  const CostVector c = true_costs(s, a, h);
  for (std::size_t i = 0; i < c.size; ++i) {
    if (c.values[i] > descriptor().tau + kCostTolerance) return false;
  }
  return true;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << "samples=" << samples << " max_feature_norm=" << max_feature_norm
     << " feature_norm_violations=" << feature_norm_violations
     << " reward_out_of_range=" << reward_out_of_range
     << " cost_out_of_range=" << cost_out_of_range
     << " baseline_nonzero_cost=" << baseline_nonzero_cost
     << " baseline_not_admissible=" << baseline_not_admissible
     << " ball_states_checked=" << ball_states_checked
     << " ball_lane_infeasible=" << ball_lane_infeasible_states
     << " ball_mask_infeasible=" << ball_mask_infeasible_states
     << " (first_step=" << ball_mask_infeasible_first_step << ")"
     << " ball_empty=" << ball_empty_states;
  return os.str();
}

ValidationReport validate_assumptions(const SimulatedEnvironment& env, std::size_t n_samples,
                                      double epsilon, RandomStream& rng) {
  if (n_samples == 0) throw InputError("validate_assumptions: n_samples must be >= 1");
  const EnvDescriptor& desc = env.descriptor();
  const SimOracle oracle = env.oracle();
  const auto d = static_cast<Eigen::Index>(desc.d);
  Vec phi(d), phi0(d);
  std::vector<ActionId> safe;
  ValidationReport rep;

  auto note = [&rep](std::string msg) {
    if (rep.messages.size() < kMaxMessages) rep.messages.push_back(std::move(msg));
  };

  for (std::size_t i = 0; i < n_samples; ++i) {
    const std::size_t h = 1 + rng.uniform_index(desc.horizon);
    State s = env.initial_state();
    bool stuck = false;
    for (std::size_t t = 1; t < h; ++t) {
      safe.clear();
      for (ActionId a = 0; a < desc.num_actions; ++a) {
        if (env.truly_safe(s, a, t)) safe.push_back(a);
      }
      if (safe.empty()) {
        stuck = true;
        break;
      }
      s = env.transition(s, safe[rng.uniform_index(safe.size())], t);
    }
    if (stuck) {
      note("no truly safe action on the way to a sample");
      continue;
    }
    ++rep.samples;

    const ActionId a = rng.uniform_index(desc.num_actions);
    env.feature_into(s, a, phi);
    const double norm = phi.norm();
    rep.max_feature_norm = std::max(rep.max_feature_norm, norm);
    if (norm > desc.feature_norm_bound + 1e-12) ++rep.feature_norm_violations;
    const double r = env.true_reward(s, a, h);
    if (r < -kCostTolerance || r > 1.0 + kCostTolerance) ++rep.reward_out_of_range;
    const CostVector c = env.true_costs(s, a, h);
    for (std::size_t k = 0; k < c.size; ++k) {
      if (c[k] < -kCostTolerance || c[k] > 1.0 + kCostTolerance) {
        ++rep.cost_out_of_range;
        break;
      }
    }

    const ActionId a0 = env.safe_baseline(s, h);
    env.feature_into(s, a0, phi0);
    bool baseline_bad = false;
    const CostVector c0 = env.true_costs(s, a0, h);
    for (std::size_t k = 0; k < c0.size; ++k) {
      const double linear = phi0.dot(oracle.gamma_star[h - 1][k]);
      if (std::abs(linear) > kBaselineTolerance || std::abs(c0[k]) > kBaselineTolerance) {
        baseline_bad = true;
      }
    }
    if (baseline_bad) {
      ++rep.baseline_nonzero_cost;
      note("baseline cost nonzero at step " + std::to_string(h));
    }
    if (!env.admissible(s, h, a0)) ++rep.baseline_not_admissible;

    ++rep.ball_states_checked;
    bool lane_bad = false, mask_bad = false, any = false;
    for (ActionId b = 0; b < desc.num_actions; ++b) {
      env.feature_into(s, b, phi);
      const double dist = (phi - phi0).norm();
      if (dist <= 0.0 || dist > epsilon) continue;
      any = true;
      if (!env.admissible(s, h, b)) mask_bad = true;
      const CostVector cb = env.true_costs(s, b, h);
      for (std::size_t k = 0; k < cb.size; ++k) {
        if (cb[k] > desc.tau + kCostTolerance) lane_bad = true;
      }
    }
    if (!any) ++rep.ball_empty_states;
    if (lane_bad) {
      ++rep.ball_lane_infeasible_states;
      note("epsilon-ball action violates the cost threshold at step " + std::to_string(h));
    }
    if (mask_bad) {
      ++rep.ball_mask_infeasible_states;
      if (h == 1) ++rep.ball_mask_infeasible_first_step;
    }
  }
  return rep;
}

}  // namespace ncs
