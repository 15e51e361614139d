#pragma once

#include <cstddef>
#include <vector>

#include "ncs/agent.hpp"
#include "ncs/mdp.hpp"

namespace ncs {

/// Best total true reward over H steps from s1 among action sequences whose
/// every step is admissible and has all true costs <= tau (+1e-12).
/// Backward recursion over the reachable tree, memoized per step.
/// Throws UnsupportedError for non-deterministic environments.
double optimal_value_dp(const SimulatedEnvironment& env, const State& s1);

/// Same quantity by brute force over all |A|^H action sequences.
/// Kept independent of the DP so each can check the other.
double exhaustive_optimal_value(const SimulatedEnvironment& env, const State& s1);

class RegretLedger {
 public:
  explicit RegretLedger(double v_star) : v_star_(v_star) {}

  /// Returns the number of violating steps in this episode.
  std::size_t record_episode(double true_return, const std::vector<CostVector>& step_costs,
                             double tau);
  std::size_t record_episode(const EpisodeRecord& ep, double tau) {
    return record_episode(ep.true_return, ep.true_costs, tau);
  }

  double v_star() const noexcept { return v_star_; }
  std::size_t size() const noexcept { return returns_.size(); }
  const std::vector<double>& returns() const noexcept { return returns_; }
  const std::vector<double>& cumulative_regret() const noexcept { return cum_regret_; }
  const std::vector<std::size_t>& violations() const noexcept { return violations_; }
  const std::vector<std::size_t>& cumulative_violations() const noexcept { return cum_violations_; }
  double total_regret() const noexcept { return cum_regret_.empty() ? 0.0 : cum_regret_.back(); }
  std::size_t total_violations() const noexcept {
    return cum_violations_.empty() ? 0 : cum_violations_.back();
  }
  /// v_star - return for 1-based episode k.
  double episode_regret(std::size_t k) const { return v_star_ - returns_.at(k - 1); }

 private:
  double v_star_;
  std::vector<double> returns_;
  std::vector<double> cum_regret_;
  std::vector<std::size_t> violations_;
  std::vector<std::size_t> cum_violations_;
};

/// Mean per-episode regret over the last 20% of episodes after k_prime is at
/// most half of the mean over the first 20%. Throws EvaluationError when
/// fewer than 100 episodes follow k_prime.
bool sublinearity_check(const RegretLedger& ledger, std::size_t k_prime);

/// Fraction of values >= v_star - 1e-9. Throws EvaluationError on empty input.
double optimism_rate(const std::vector<double>& values, double v_star);

/// Value estimates of all exploitation episodes in a run.
std::vector<double> exploitation_values(const std::vector<EpisodeRecord>& episodes);

}  // namespace ncs
