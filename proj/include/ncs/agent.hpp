#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "ncs/linalg.hpp"
#include "ncs/mdp.hpp"
#include "ncs/rng.hpp"
#include "ncs/safe_set.hpp"

namespace ncs {

enum class QUpdateSchedule {
  /// Recompute w at episodes K'+1, K'+2, K'+4, K'+8, ...
  Doubling,
  EveryEpisode,
};

std::string_view to_string(QUpdateSchedule s);
QUpdateSchedule parse_q_schedule(std::string_view s);

/// User-facing agent configuration. Unset optionals take the theory defaults
/// once the environment is known (see resolve_agent_params).
struct AgentConfig {
  std::size_t episodes = 1000;  // K
  std::size_t k_prime = 300;    // pure-exploration episodes
  double epsilon = 0.1;         // exploration radius in feature space
  std::optional<double> iota;   // boundary margin; default min(0.1, tau/2)
  std::optional<double> nu;     // default 2/tau
  double lambda = 1.0;
  std::optional<double> beta1;  // default c_beta * d * H * sqrt(ln(dK / (tau delta)))
  std::optional<double> beta2;  // default from ncs::beta2 with the env's sigma
  double c_beta = 0.02;
  double delta = 0.01;
  QUpdateSchedule q_schedule = QUpdateSchedule::Doubling;
};

/// Fully resolved parameters for one agent run.
struct AgentParams {
  std::size_t episodes = 0;
  std::size_t k_prime = 0;  // may exceed episodes; then every episode explores
  double epsilon = 0.0;
  double iota = 0.0;
  double nu = 0.0;
  double lambda = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  std::size_t d = 0;
  std::size_t horizon = 0;
  std::size_t sides = 1;
  QUpdateSchedule q_schedule = QUpdateSchedule::Doubling;
};

/// Validates config against env (throws ConfigError naming the key) and fills
/// in defaults. Requires epsilon in (0, tau/sqrt(d)) and iota in (0, tau).
AgentParams resolve_agent_params(const AgentConfig& cfg, const EnvDescriptor& env);

double default_beta1(double c_beta, std::size_t d, std::size_t H, std::size_t K, double tau,
                     double delta);

/// Sufficient pure-exploration length:
///   ceil(max(8d/eps^2 ln(dH/delta), 2d/eps^2 (16 beta2^2/iota^2 - lambda), 0)).
std::size_t compute_kprime(std::size_t d, double epsilon, double iota, double beta2,
                           double lambda, std::size_t H, double delta);

/// Whether w is recomputed at the start of (1-based) episode k.
bool is_q_update_episode(QUpdateSchedule schedule, std::size_t k, std::size_t k_prime);

enum class Phase { PureExploration, Exploitation };

std::string_view to_string(Phase p);

struct EpisodeRecord {
  std::size_t episode = 0;  // 1-based
  Phase phase = Phase::PureExploration;
  std::vector<State> states;
  std::vector<ActionId> actions;
  std::vector<double> noisy_rewards;
  std::vector<CostVector> noisy_costs;
  // Oracle-logged values, never fed back to the learner.
  std::vector<double> true_rewards;
  std::vector<CostVector> true_costs;
  double true_return = 0.0;
  std::size_t violations = 0;  // steps with some true cost > tau + 1e-12
  /// V^k_1(s1) the agent acted on; NaN during pure exploration.
  double value_estimate = 0.0;
  bool q_updated = false;
  double wallclock_ms = 0.0;

  bool violated() const noexcept { return violations > 0; }
};

struct Transition {
  State state;
  ActionId action = 0;
  Vec phi;
  double noisy_reward = 0.0;
  State next_state;
};

/// Per-step optimistic Q estimate: w_h and the design matrix it was fit with.
struct QEstimate {
  Vec w;
  PrecisionMatrix design;
};

/// Safe least-squares value iteration for episodic linear MDPs with
/// instantaneous hard constraints.
///
/// Episodes 1..K' sample uniformly from the feature-space epsilon-ball around
/// the baseline action. Afterwards the agent recomputes the Q weights by
/// backward ridge regression (on the configured schedule) and acts greedily
/// with respect to <phi, w_h> + bonus over its estimated safe set. Safe-set
/// estimators absorb every observed cost immediately.
class NcsLsvi {
 public:
  using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

  explicit NcsLsvi(const AgentParams& params);

  /// Throws ConfigError when env's d, H or constraint count disagree with params.
  std::vector<EpisodeRecord> run(const Environment& env, RandomStream& rng,
                                 const EpisodeCallback& on_episode = {});

  /// Actions with 0 < |phi(s,a) - phi(s,a0)| <= epsilon that the env admits.
  std::vector<ActionId> exploration_candidates(const Environment& env, const State& s,
                                               std::size_t h) const;
  /// Uniform draw from exploration_candidates, or the baseline if it is empty.
  ActionId pure_explore_action(const Environment& env, const State& s, std::size_t h,
                               RandomStream& rng) const;

  /// The baseline is always a member; other actions must be admissible and
  /// inside every side's estimated safe set.
  bool is_member(const Environment& env, const State& s, std::size_t h, ActionId a) const;
  double bonus(const Environment& env, const State& s, ActionId a, std::size_t h) const;
  /// <phi(s,a), w_h> + bonus(s,a,h).
  double q_value(const Environment& env, const State& s, ActionId a, std::size_t h) const;
  /// argmax of q_value over members; lowest index wins ties.
  ActionId select_action(const Environment& env, const State& s, std::size_t h) const;
  /// min(max over members of Q_h(s, .), H), floored at 0; 0 at h = H+1.
  double value(const Environment& env, const State& s, std::size_t h) const;

  /// Refit w_h for h = H..1 on all history, targets r + V_{h+1}(s').
  void backward_update(const Environment& env);

  /// Appends to history and feeds every constraint side's safe-set estimator.
  void record_step(const Environment& env, std::size_t h, const State& s, ActionId a,
                   const StepOutcome& outcome);

  const AgentParams& params() const noexcept { return params_; }
  const SafeSetEstimate& safe_set(std::size_t h, std::size_t side) const;
  const QEstimate& q_estimate(std::size_t h) const;
  const std::vector<Transition>& history(std::size_t h) const;
  std::size_t history_size() const;
  std::size_t episodes_completed() const noexcept { return completed_; }

 private:
  struct Scan {
    ActionId best = 0;
    double best_q = 0.0;
  };
  Scan scan_members(const Environment& env, const State& s, std::size_t h) const;
  double q_value_at(const Vec& phi, const Vec& dphi, std::size_t h) const;
  bool contains_all(std::size_t h, const Vec& dphi) const;
  void check_environment(const Environment& env) const;

  AgentParams params_;
  std::vector<QEstimate> q_;                           // index h-1
  std::vector<std::vector<SafeSetEstimate>> safe_;     // [h-1][side]
  std::vector<std::vector<Transition>> history_;       // [h-1]
  std::size_t completed_ = 0;
};

}  // namespace ncs
