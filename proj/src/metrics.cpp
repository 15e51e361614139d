#include "ncs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "ncs/errors.hpp"

namespace ncs {

namespace {

constexpr double kViolationTolerance = 1e-12;
constexpr double kOptimismSlack = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_deterministic(const SimulatedEnvironment& env) {
  if (!env.descriptor().deterministic) {
    throw UnsupportedError("optimal value search needs deterministic dynamics; " +
                           env.descriptor().name + " is stochastic");
  }
}

class Solver {
 public:
  explicit Solver(const SimulatedEnvironment& env)
      : env_(env), memo_(env.descriptor().horizon) {}

  double value(const State& s, std::size_t h) {
    if (h > env_.descriptor().horizon) return 0.0;
    auto& table = memo_[h - 1];
    if (auto it = table.find(s); it != table.end()) return it->second;
    double best = kNegInf;
    for (ActionId a = 0; a < env_.descriptor().num_actions; ++a) {
      if (!env_.truly_safe(s, a, h)) continue;
      const double tail = value(env_.transition(s, a, h), h + 1);
      if (tail == kNegInf) continue;
      best = std::max(best, env_.true_reward(s, a, h) + tail);
    }
    table.emplace(s, best);
    return best;
  }

 private:
  const SimulatedEnvironment& env_;
  std::vector<std::unordered_map<State, double, StateHash>> memo_;
};

}  // namespace

double optimal_value_dp(const SimulatedEnvironment& env, const State& s1) {
  require_deterministic(env);
  return Solver(env).value(s1, 1);
}

double exhaustive_optimal_value(const SimulatedEnvironment& env, const State& s1) {
  require_deterministic(env);
  const std::size_t H = env.descriptor().horizon;
  const std::size_t n = env.descriptor().num_actions;
  // Odometer over sequences. Prefix results are cached per depth so only the
  // suffix after the changed digit is re-simulated.
  std::vector<ActionId> seq(H, 0);
  std::vector<State> states(H + 1);
  std::vector<double> partial(H + 1, 0.0);
  std::vector<bool> feasible(H + 1, true);
  states[0] = s1;
  double best = kNegInf;
  std::size_t from = 0;
  while (true) {
    for (std::size_t i = from; i < H; ++i) {
      const std::size_t h = i + 1;
      if (!feasible[i]) {
        feasible[i + 1] = false;
        continue;
      }
      const ActionId a = seq[i];
      feasible[i + 1] = env.truly_safe(states[i], a, h);
      partial[i + 1] = partial[i] + env.true_reward(states[i], a, h);
      states[i + 1] = env.transition(states[i], a, h);
    }
    if (feasible[H]) best = std::max(best, partial[H]);
    std::size_t pos = H;
    while (pos > 0) {
      --pos;
      if (++seq[pos] < n) break;
      seq[pos] = 0;
      if (pos == 0) return best;
    }
    from = pos;
  }
}

std::size_t RegretLedger::record_episode(double true_return,
                                         const std::vector<CostVector>& step_costs, double tau) {
  std::size_t bad = 0;
  for (const auto& c : step_costs) {
    if (c.size > 0 && c.max() > tau + kViolationTolerance) ++bad;
  }
  returns_.push_back(true_return);
  cum_regret_.push_back(total_regret() + (v_star_ - true_return));
  violations_.push_back(bad);
  cum_violations_.push_back(total_violations() + bad);
  return bad;
}

bool sublinearity_check(const RegretLedger& ledger, std::size_t k_prime) {
  const std::size_t start = std::min(k_prime, ledger.size());
  const std::size_t n = ledger.size() - start;
  if (n < 100) {
    throw EvaluationError("sublinearity check needs at least 100 episodes after K'; got " +
                          std::to_string(n));
  }
  const std::size_t w = n / 5;
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    head += ledger.episode_regret(start + 1 + i);
    tail += ledger.episode_regret(ledger.size() - i);
  }
  return tail / static_cast<double>(w) <= 0.5 * head / static_cast<double>(w);
}

double optimism_rate(const std::vector<double>& values, double v_star) {
  if (values.empty()) throw EvaluationError("optimism rate over zero episodes");
  const auto hits = std::count_if(values.begin(), values.end(),
                                  [&](double v) { return v >= v_star - kOptimismSlack; });
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

std::vector<double> exploitation_values(const std::vector<EpisodeRecord>& episodes) {
  std::vector<double> out;
  for (const auto& ep : episodes) {
    if (ep.phase == Phase::Exploitation) out.push_back(ep.value_estimate);
  }
  return out;
}

}  // namespace ncs
