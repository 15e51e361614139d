#include <gtest/gtest.h>

#include <unordered_set>

#include "ncs/envs/merge.hpp"
#include "ncs/envs/toy_covering.hpp"
#include "ncs/errors.hpp"
#include "ncs/mdp.hpp"
#include "support.hpp"

using namespace ncs;

TEST(CostVector, PushAndMax) {
  CostVector c;
  EXPECT_EQ(c.size, 0u);
  c.push(-0.5);
  c.push(0.25);
  EXPECT_EQ(c.size, 2u);
  EXPECT_EQ(c[0], -0.5);
  EXPECT_EQ(c.max(), 0.25);
  EXPECT_THROW(c.push(1.0), InputError);
}

TEST(StateHash, EqualStatesHashEqual) {
  const State a{{0.125, -0.25, 0.5, 0.0}};
  const State b{{0.125, -0.25, 0.5, 0.0}};
  EXPECT_EQ(StateHash{}(a), StateHash{}(b));
  std::unordered_set<State, StateHash> set{a, b, State{{0.125, -0.25, 0.5, 1e-9}}};
  EXPECT_EQ(set.size(), 2u);
}

TEST(Step, ZeroNoiseReportsTruth) {
  ToyCoveringConfig c;
  c.sigma = 0.0;
  const ToyCoveringEnv env(c);
  RandomStream r(3);
  for (ActionId a = 0; a < env.descriptor().num_actions; ++a) {
    const StepOutcome o = env.step(env.initial_state(), a, 1, r);
    ASSERT_EQ(o.noisy_reward, o.true_reward);
    ASSERT_EQ(o.noisy_costs[0], o.true_costs[0]);
    ASSERT_EQ(o.next_state, env.transition(env.initial_state(), a, 1));
  }
}

TEST(Step, NoiseIsBoundedAndCentered) {
  ToyCoveringConfig c;
  c.sigma = 0.05;
  const ToyCoveringEnv env(c);
  RandomStream r(4);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const StepOutcome o = env.step(env.initial_state(), 10, 1, r);
    const double e = o.noisy_reward - o.true_reward;
    sum += e;
  }
  EXPECT_LT(std::abs(sum / n), 4.0 * 0.05 / std::sqrt(static_cast<double>(n)));
}

TEST(Step, RejectsBadIndices) {
  const ToyCoveringEnv env(ToyCoveringConfig{});
  RandomStream r(5);
  EXPECT_THROW(env.step(env.initial_state(), 0, 0, r), InputError);
  EXPECT_THROW(env.step(env.initial_state(), 0, 4, r), InputError);
  EXPECT_THROW(env.step(env.initial_state(), 66, 1, r), InputError);
  EXPECT_THROW(env.feature(env.initial_state(), 66), InputError);
}

TEST(Step, TrulySafeUsesMaskAndCosts) {
  const MergeEnv env{MergeEnvConfig{}};
  const State rest = env.initial_state();
  EXPECT_FALSE(env.truly_safe(rest, env.action_id(0.25, 0.0), 1));   // masked
  EXPECT_TRUE(env.truly_safe(rest, env.action_id(0.25, 0.0), 2));
  EXPECT_FALSE(env.truly_safe(rest, env.action_id(0.0, 1.0), 2));    // y' = 0.5 > y_max
  EXPECT_TRUE(env.truly_safe(rest, env.action_id(0.0, 0.625), 2));   // y' = 0.3125
}

TEST(Validator, ToyPassesEverything) {
  const ToyCoveringEnv env(ToyCoveringConfig{});
  RandomStream r(6);
  const ValidationReport rep = validate_assumptions(env, 1000, 0.01, r);
  EXPECT_EQ(rep.samples, 1000u);
  EXPECT_TRUE(rep.ok()) << rep.summary();
  EXPECT_GT(rep.ball_states_checked, 0u);
}

TEST(Validator, FlagsCostOutsideUnitRange) {
  // Cost <phi, (0, 1)> = 2 on action 1.
  std::vector<Vec> row{(Vec(2) << 0.0, 0.0).finished(), (Vec(2) << 0.0, 0.9).finished()};
  ncs::testing::TableEnv env({row}, (Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 0.0, 2.0).finished(),
                        2.0);
  RandomStream r(7);
  const ValidationReport rep = validate_assumptions(env, 200, 1.0, r);
  EXPECT_GT(rep.cost_out_of_range, 0u);
  EXPECT_FALSE(rep.ranges_ok());
}

TEST(Validator, FlagsUnsafeBaseline) {
  std::vector<Vec> row{(Vec(2) << 0.0, 0.5).finished(), (Vec(2) << 0.5, 0.0).finished()};
  ncs::testing::TableEnv env({row}, (Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 0.0, 1.0).finished(),
                        1.0);
  RandomStream r(8);
  const ValidationReport rep = validate_assumptions(env, 100, 1.0, r);
  EXPECT_GT(rep.baseline_nonzero_cost, 0u);
  EXPECT_FALSE(rep.baseline_ok());
}

TEST(Validator, FlagsBallActionOverThreshold) {
  // Action 1 is within epsilon of the baseline but costs 0.5 > tau = 0.3.
  std::vector<Vec> row{(Vec(2) << 0.0, 0.0).finished(), (Vec(2) << 0.0, 0.5).finished()};
  ncs::testing::TableEnv env({row}, (Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 0.0, 1.0).finished(),
                        0.3);
  RandomStream r(9);
  const ValidationReport rep = validate_assumptions(env, 100, 0.6, r);
  EXPECT_GT(rep.ball_lane_infeasible_states, 0u);
  EXPECT_FALSE(rep.local_ball_ok());
}
