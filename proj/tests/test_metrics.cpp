#include <gtest/gtest.h>

#include <cmath>

#include "ncs/envs/merge.hpp"
#include "ncs/envs/synthetic.hpp"
#include "ncs/envs/toy_covering.hpp"
#include "ncs/errors.hpp"
#include "ncs/metrics.hpp"
#include "support.hpp"

using namespace ncs;
using ncs::testing::TableEnv;

namespace {
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
}  // namespace

TEST(OptimalValue, SingleStepPicksBestSafeReward) {
  const TableEnv env = TableEnv::rewards({0.2, 0.7, 0.4});
  EXPECT_DOUBLE_EQ(optimal_value_dp(env, env.initial_state()), 0.7);
  EXPECT_DOUBLE_EQ(exhaustive_optimal_value(env, env.initial_state()), 0.7);
}

TEST(OptimalValue, UnsafeActionsAreExcluded) {
  // Action 1 has the best reward but costs 0.6 > tau = 0.5; only the baseline remains.
  const TableEnv env({{v2(0.1, 0.0), v2(0.9, 0.6)}}, v2(1, 0), v2(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(optimal_value_dp(env, env.initial_state()), 0.1);
}

TEST(OptimalValue, TwoStepChainSums) {
  const TableEnv env({{v2(0.0, 0.0), v2(0.5, 0.2)}, {v2(0.1, 0.0), v2(0.3, 0.9)}}, v2(1, 0),
                     v2(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(optimal_value_dp(env, env.initial_state()), 0.6);
  EXPECT_DOUBLE_EQ(exhaustive_optimal_value(env, env.initial_state()), 0.6);
}

TEST(OptimalValue, RejectsStochasticEnvironment) {
  TableEnv env = TableEnv::rewards({0.2, 0.7});
  env.mark_stochastic();
  EXPECT_THROW(optimal_value_dp(env, env.initial_state()), UnsupportedError);
}

TEST(OptimalValue, DpMatchesExhaustiveOnShippedEnvs) {
  const MergeEnv merge{MergeEnvConfig{}};
  const double vm = optimal_value_dp(merge, merge.initial_state());
  EXPECT_NEAR(vm, exhaustive_optimal_value(merge, merge.initial_state()), 1e-12);
  EXPECT_NEAR(vm, 2.5, 1e-12);

  const MergeEnv star = star_convex_variant(MergeEnvConfig{});
  const double vs = optimal_value_dp(star, star.initial_state());
  EXPECT_NEAR(vs, exhaustive_optimal_value(star, star.initial_state()), 1e-12);
  EXPECT_GE(vs, vm - 1e-12);

  for (std::size_t n = 1; n <= 3; ++n) {
    ToyCoveringConfig c;
    c.n_states = n;
    const ToyCoveringEnv toy(c);
    const double v = optimal_value_dp(toy, toy.initial_state());
    EXPECT_NEAR(v, exhaustive_optimal_value(toy, toy.initial_state()), 1e-12) << n;
    double closed = 0.0;
    for (std::size_t s = 1; s <= n; ++s) closed += toy_value(toy.gamma(), s, c.tau);
    EXPECT_NEAR(v, closed, 1e-12) << n;
  }

  const SyntheticLinearEnv syn(SyntheticConfig{});
  const double vsyn = optimal_value_dp(syn, syn.initial_state());
  EXPECT_NEAR(vsyn, exhaustive_optimal_value(syn, syn.initial_state()), 1e-12);
  EXPECT_NEAR(vsyn, 1.7089337398056998, 1e-12);
}

TEST(Ledger, Arithmetic) {
  RegretLedger led(2.0);
  CostVector ok, bad;
  ok.push(0.1);
  bad.push(0.7);
  EXPECT_EQ(led.record_episode(1.5, {ok, ok}, 0.5), 0u);
  EXPECT_EQ(led.record_episode(2.0, {bad, ok}, 0.5), 1u);
  EXPECT_EQ(led.record_episode(0.5, {bad, bad}, 0.5), 2u);
  EXPECT_EQ(led.size(), 3u);
  EXPECT_EQ(led.cumulative_regret(), (std::vector<double>{0.5, 0.5, 2.0}));
  EXPECT_EQ(led.cumulative_violations(), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(led.total_violations(), 3u);
  EXPECT_DOUBLE_EQ(led.total_regret(), 2.0);
  EXPECT_DOUBLE_EQ(led.episode_regret(3), 1.5);
  CostVector edge;
  edge.push(0.5 + 1e-13);
  EXPECT_EQ(led.record_episode(2.0, {edge}, 0.5), 0u);
}

TEST(Sublinearity, ConstantRegretFails) {
  RegretLedger led(1.0);
  for (int k = 0; k < 500; ++k) led.record_episode(0.5, {}, 1.0);
  EXPECT_FALSE(sublinearity_check(led, 0));
}

TEST(Sublinearity, DecayingRegretPasses) {
  RegretLedger led(1.0);
  for (int k = 1; k <= 500; ++k) led.record_episode(1.0 - 1.0 / std::sqrt(k), {}, 1.0);
  EXPECT_TRUE(sublinearity_check(led, 0));
}

TEST(Sublinearity, IgnoresExplorationPrefix) {
  RegretLedger led(1.0);
  for (int k = 0; k < 100; ++k) led.record_episode(1.0, {}, 1.0);
  for (int k = 0; k < 400; ++k) led.record_episode(0.5, {}, 1.0);
  // Over the whole run regret rises; after k' = 100 it is flat.
  EXPECT_FALSE(sublinearity_check(led, 100));
}

TEST(Sublinearity, TooFewEpisodesThrows) {
  RegretLedger led(1.0);
  for (int k = 0; k < 150; ++k) led.record_episode(0.5, {}, 1.0);
  EXPECT_THROW(sublinearity_check(led, 60), EvaluationError);
  EXPECT_NO_THROW(sublinearity_check(led, 50));
}

TEST(Optimism, Rate) {
  EXPECT_DOUBLE_EQ(optimism_rate({1.0, 2.0, 0.5, 1.0 - 1e-10}, 1.0), 0.75);
  EXPECT_THROW(optimism_rate({}, 1.0), EvaluationError);
  EpisodeRecord a, b;
  a.phase = Phase::PureExploration;
  a.value_estimate = NAN;
  b.phase = Phase::Exploitation;
  b.value_estimate = 1.25;
  EXPECT_EQ(exploitation_values({a, b}), (std::vector<double>{1.25}));
}

TEST(Optimism, HugeBonusIsAlwaysOptimistic) {
  const SyntheticLinearEnv env(SyntheticConfig{});
  AgentConfig c;
  c.episodes = 50;
  c.k_prime = 10;
  c.epsilon = 0.2;
  c.beta1 = 100.0;
  NcsLsvi agent(resolve_agent_params(c, env.descriptor()));
  RandomStream r(1);
  const auto eps = agent.run(env, r);
  const double v_star = optimal_value_dp(env, env.initial_state());
  EXPECT_DOUBLE_EQ(optimism_rate(exploitation_values(eps), v_star), 1.0);
}
