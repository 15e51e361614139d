#include "ncs/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "ncs/errors.hpp"

namespace ncs {

namespace {
constexpr double kViolationTolerance = 1e-12;
}  // namespace

std::string_view to_string(QUpdateSchedule s) {
  return s == QUpdateSchedule::Doubling ? "doubling" : "every";
}

QUpdateSchedule parse_q_schedule(std::string_view s) {
  if (s == "doubling") return QUpdateSchedule::Doubling;
  if (s == "every") return QUpdateSchedule::EveryEpisode;
  throw ConfigError("unknown Q update schedule '" + std::string(s) + "'", "agent.q_schedule");
}

std::string_view to_string(Phase p) {
  return p == Phase::PureExploration ? "explore" : "exploit";
}

double default_beta1(double c_beta, std::size_t d, std::size_t H, std::size_t K, double tau,
                     double delta) {
  const double dd = static_cast<double>(d);
  const double arg = dd * static_cast<double>(K) / (tau * delta);
  return c_beta * dd * static_cast<double>(H) * std::sqrt(std::max(0.0, std::log(arg)));
}

std::size_t compute_kprime(std::size_t d, double epsilon, double iota, double beta2,
                           double lambda, std::size_t H, double delta) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive", "agent.epsilon");
  if (!(iota > 0.0)) throw ConfigError("iota must be positive", "agent.iota");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)", "agent.delta");
  const double dd = static_cast<double>(d);
  const double e2 = epsilon * epsilon;
  const double first = 8.0 * dd / e2 * std::log(dd * static_cast<double>(H) / delta);
  const double second = 2.0 * dd / e2 * (16.0 * beta2 * beta2 / (iota * iota) - lambda);
  return static_cast<std::size_t>(std::ceil(std::max({first, second, 0.0})));
}

bool is_q_update_episode(QUpdateSchedule schedule, std::size_t k, std::size_t k_prime) {
  if (k <= k_prime) return false;
  if (schedule == QUpdateSchedule::EveryEpisode) return true;
  const std::size_t offset = k - k_prime;
  return (offset & (offset - 1)) == 0;
}

AgentParams resolve_agent_params(const AgentConfig& cfg, const EnvDescriptor& env) {
  AgentParams p;
  p.episodes = cfg.episodes;
  p.k_prime = cfg.k_prime;
  p.lambda = cfg.lambda;
  p.delta = cfg.delta;
  p.tau = env.tau;
  p.d = env.d;
  p.horizon = env.horizon;
  p.sides = env.num_constraints;
  p.q_schedule = cfg.q_schedule;

  if (cfg.episodes == 0) throw ConfigError("agent.k must be at least 1", "agent.k");
  if (!(cfg.lambda > 0.0)) throw ConfigError("agent.lambda must be positive", "agent.lambda");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw ConfigError("agent.delta must lie in (0, 1)", "agent.delta");
  }
  if (!(env.tau > 0.0)) throw ConfigError("environment tau must be positive", "env.tau");
  const double eps_max = env.tau / std::sqrt(static_cast<double>(env.d));
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < eps_max)) {
    throw ConfigError("agent.epsilon = " + std::to_string(cfg.epsilon) +
                          " must lie in (0, tau/sqrt(d)) = (0, " + std::to_string(eps_max) + ")",
                      "agent.epsilon");
  }
  p.epsilon = cfg.epsilon;
  p.iota = cfg.iota.value_or(std::min(0.1, env.tau / 2.0));
  if (!(p.iota > 0.0 && p.iota < env.tau)) {
    throw ConfigError("agent.iota must lie in (0, tau)", "agent.iota");
  }
  p.nu = cfg.nu.value_or(2.0 / env.tau);
  if (!(p.nu >= 0.0)) throw ConfigError("agent.nu must be nonnegative", "agent.nu");
  if (!(cfg.c_beta >= 0.0)) throw ConfigError("agent.c_beta must be nonnegative", "agent.c_beta");
  p.beta1 = cfg.beta1.value_or(
      default_beta1(cfg.c_beta, env.d, env.horizon, cfg.episodes, env.tau, cfg.delta));
  if (!(p.beta1 >= 0.0)) throw ConfigError("agent.beta1 must be nonnegative", "agent.beta1");
  p.beta2 = cfg.beta2.value_or(
      beta2(env.sigma, env.d, cfg.episodes, env.horizon, cfg.lambda, cfg.delta));
  if (!(p.beta2 >= 0.0)) throw ConfigError("agent.beta2 must be nonnegative", "agent.beta2");
  return p;
}

NcsLsvi::NcsLsvi(const AgentParams& params) : params_(params) {
  if (params.d == 0 || params.horizon == 0) throw ConfigError("agent needs d >= 1 and H >= 1");
  if (params.sides == 0 || params.sides > CostVector::kMaxSides) {
    throw ConfigError("unsupported number of constraint sides");
  }
  const auto d = static_cast<Eigen::Index>(params.d);
  q_.reserve(params.horizon);
  for (std::size_t h = 0; h < params.horizon; ++h) {
    q_.push_back(QEstimate{Vec::Zero(d), PrecisionMatrix(params.d, params.lambda)});
    safe_.emplace_back();
    for (std::size_t k = 0; k < params.sides; ++k) {
      safe_.back().emplace_back(params.d, params.lambda, params.beta2, params.tau);
    }
  }
  history_.resize(params.horizon);
}

void NcsLsvi::check_environment(const Environment& env) const {
  const EnvDescriptor& desc = env.descriptor();
  if (desc.d != params_.d || desc.horizon != params_.horizon ||
      desc.num_constraints != params_.sides) {
    throw ConfigError("agent/environment mismatch: agent (d=" + std::to_string(params_.d) +
                      ", H=" + std::to_string(params_.horizon) + ") vs " + desc.name + " (d=" +
                      std::to_string(desc.d) + ", H=" + std::to_string(desc.horizon) + ")");
  }
}

const SafeSetEstimate& NcsLsvi::safe_set(std::size_t h, std::size_t side) const {
  return safe_.at(h - 1).at(side);
}

const QEstimate& NcsLsvi::q_estimate(std::size_t h) const { return q_.at(h - 1); }

const std::vector<Transition>& NcsLsvi::history(std::size_t h) const { return history_.at(h - 1); }

std::size_t NcsLsvi::history_size() const {
  std::size_t n = 0;
  for (const auto& h : history_) n += h.size();
  return n;
}

bool NcsLsvi::contains_all(std::size_t h, const Vec& dphi) const {
  for (const SafeSetEstimate& s : safe_[h - 1]) {
    if (!s.contains(dphi)) return false;
  }
  return true;
}

double NcsLsvi::q_value_at(const Vec& phi, const Vec& dphi, std::size_t h) const {
  const QEstimate& q = q_[h - 1];
  double width = 0.0;
  for (const SafeSetEstimate& s : safe_[h - 1]) width += s.width(dphi);
  const double g = params_.nu * width * static_cast<double>(params_.horizon);
  return phi.dot(q.w) + params_.beta1 * q.design.weighted_norm(phi) + g;
}

std::vector<ActionId> NcsLsvi::exploration_candidates(const Environment& env, const State& s,
                                                      std::size_t h) const {
  const ActionId a0 = env.safe_baseline(s, h);
  const Vec phi0 = env.feature(s, a0);
  Vec phi(phi0.size());
  std::vector<ActionId> out;
  for (ActionId a = 0; a < env.descriptor().num_actions; ++a) {
    if (!env.admissible(s, h, a)) continue;
    env.feature_into(s, a, phi);
    const double dist = (phi - phi0).norm();
    if (dist > 0.0 && dist <= params_.epsilon) out.push_back(a);
  }
  return out;
}

ActionId NcsLsvi::pure_explore_action(const Environment& env, const State& s, std::size_t h,
                                      RandomStream& rng) const {
  const std::vector<ActionId> candidates = exploration_candidates(env, s, h);
  if (candidates.empty()) return env.safe_baseline(s, h);
  return candidates[rng.uniform_index(candidates.size())];
}

bool NcsLsvi::is_member(const Environment& env, const State& s, std::size_t h, ActionId a) const {
  const ActionId a0 = env.safe_baseline(s, h);
  if (a == a0) return true;
  if (!env.admissible(s, h, a)) return false;
  return contains_all(h, env.feature(s, a) - env.feature(s, a0));
}

double NcsLsvi::bonus(const Environment& env, const State& s, ActionId a, std::size_t h) const {
  const Vec phi = env.feature(s, a);
  const Vec dphi = phi - env.feature(s, env.safe_baseline(s, h));
  double width = 0.0;
  for (const SafeSetEstimate& set : safe_[h - 1]) width += set.width(dphi);
  return params_.beta1 * q_[h - 1].design.weighted_norm(phi) +
         params_.nu * width * static_cast<double>(params_.horizon);
}

double NcsLsvi::q_value(const Environment& env, const State& s, ActionId a, std::size_t h) const {
  const Vec phi = env.feature(s, a);
  const Vec dphi = phi - env.feature(s, env.safe_baseline(s, h));
  return q_value_at(phi, dphi, h);
}

NcsLsvi::Scan NcsLsvi::scan_members(const Environment& env, const State& s, std::size_t h) const {
  const ActionId a0 = env.safe_baseline(s, h);
  const Vec phi0 = env.feature(s, a0);
  Vec phi(phi0.size()), dphi(phi0.size());
  Scan best{a0, -std::numeric_limits<double>::infinity()};
  for (ActionId a = 0; a < env.descriptor().num_actions; ++a) {
    if (a != a0 && !env.admissible(s, h, a)) continue;
    env.feature_into(s, a, phi);
    dphi = phi - phi0;
    if (a != a0 && !contains_all(h, dphi)) continue;
    const double q = q_value_at(phi, dphi, h);
    if (q > best.best_q) best = Scan{a, q};
  }
  return best;
}

ActionId NcsLsvi::select_action(const Environment& env, const State& s, std::size_t h) const {
  return scan_members(env, s, h).best;
}

double NcsLsvi::value(const Environment& env, const State& s, std::size_t h) const {
  if (h > params_.horizon) return 0.0;
  const double q = scan_members(env, s, h).best_q;
  return std::clamp(q, 0.0, static_cast<double>(params_.horizon));
}

void NcsLsvi::backward_update(const Environment& env) {
  for (std::size_t h = params_.horizon; h >= 1; --h) {
    RlsEstimator fit(params_.d, params_.lambda);
    for (const Transition& t : history_[h - 1]) {
      const double target = t.noisy_reward + value(env, t.next_state, h + 1);
      fit.observe(t.phi, target);
    }
    q_[h - 1] = QEstimate{fit.estimate(), fit.design()};
  }
}

void NcsLsvi::record_step(const Environment& env, std::size_t h, const State& s, ActionId a,
                          const StepOutcome& outcome) {
  Transition t{s, a, env.feature(s, a), outcome.noisy_reward, outcome.next_state};
  const Vec dphi = t.phi - env.feature(s, env.safe_baseline(s, h));
  for (std::size_t k = 0; k < params_.sides; ++k) {
    safe_[h - 1][k].observe_cost(dphi, outcome.noisy_costs[k]);
  }
  history_[h - 1].push_back(std::move(t));
}

std::vector<EpisodeRecord> NcsLsvi::run(const Environment& env, RandomStream& rng,
                                        const EpisodeCallback& on_episode) {
  check_environment(env);
  RandomStream noise = rng.child("env-noise");
  RandomStream explore = rng.child("exploration");
  const State s1 = env.initial_state();
  const std::size_t H = params_.horizon;

  std::vector<EpisodeRecord> records;
  records.reserve(params_.episodes);
  for (std::size_t k = 1; k <= params_.episodes; ++k) {
    const auto start = std::chrono::steady_clock::now();
    EpisodeRecord rec;
    rec.episode = k;
    rec.phase = k <= params_.k_prime ? Phase::PureExploration : Phase::Exploitation;
    rec.value_estimate = std::numeric_limits<double>::quiet_NaN();
    if (rec.phase == Phase::Exploitation) {
      if (is_q_update_episode(params_.q_schedule, k, params_.k_prime)) {
        backward_update(env);
        rec.q_updated = true;
      }
      rec.value_estimate = value(env, s1, 1);
    }

    State s = s1;
    for (std::size_t h = 1; h <= H; ++h) {
      const ActionId a = rec.phase == Phase::PureExploration
                             ? pure_explore_action(env, s, h, explore)
                             : select_action(env, s, h);
      const StepOutcome out = env.step(s, a, h, noise);
      record_step(env, h, s, a, out);

      rec.states.push_back(s);
      rec.actions.push_back(a);
      rec.noisy_rewards.push_back(out.noisy_reward);
      rec.noisy_costs.push_back(out.noisy_costs);
      rec.true_rewards.push_back(out.true_reward);
      rec.true_costs.push_back(out.true_costs);
      rec.true_return += out.true_reward;
      if (out.true_costs.max() > params_.tau + kViolationTolerance) ++rec.violations;
      s = out.next_state;
    }
    ++completed_;
    rec.wallclock_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    if (on_episode) on_episode(rec);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace ncs
