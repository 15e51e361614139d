#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ncs/errors.hpp"
#include "ncs/linalg.hpp"
#include "ncs/mdp.hpp"
#include "ncs/rng.hpp"
#include "ncs/safe_set.hpp"

namespace ncs::testing {

inline Vec random_in_ball(RandomStream& r, std::size_t d, double radius) {
  Vec v(static_cast<Eigen::Index>(d));
  for (auto& x : v) x = r.gaussian();
  const double u = std::pow(r.uniform(), 1.0 / static_cast<double>(d));
  return v.normalized() * radius * u;
}

struct CoverageResult {
  std::size_t replications = 0;
  std::size_t covered = 0;
  std::size_t covered_on_probes = 0;
};

/// Repeats: draw gamma* with |gamma*| <= sqrt(d), observe n noisy costs at
/// random regressors in the unit ball, and check whether
/// |<x, gamma_hat - gamma*>| <= beta2 |x|_{Lambda^{-1}} for every x. The
/// supremum over x equals |gamma_hat - gamma*|_Lambda; a finite probe set is
/// checked as well.
inline CoverageResult coverage_experiment(std::size_t d, double sigma, double delta,
                                          std::size_t reps, std::size_t n_obs,
                                          std::uint64_t seed) {
  constexpr double kLambda = 1.0;
  const double width = beta2(sigma, d, n_obs, 1, kLambda, delta);
  CoverageResult out;
  RandomStream root(seed);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    RandomStream r = root.child("rep-" + std::to_string(rep));
    const Vec truth = random_in_ball(r, d, std::sqrt(static_cast<double>(d)));
    RlsEstimator est(d, kLambda);
    for (std::size_t i = 0; i < n_obs; ++i) {
      const Vec x = random_in_ball(r, d, 1.0);
      est.observe(x, x.dot(truth) + sigma * r.gaussian());
    }
    const Vec err = est.estimate() - truth;
    const double ellipsoid = std::sqrt(err.dot(est.design().matrix() * err));
    ++out.replications;
    if (ellipsoid <= width) ++out.covered;
    bool probes_ok = true;
    for (int p = 0; p < 200 && probes_ok; ++p) {
      const Vec x = random_in_ball(r, d, 1.0);
      probes_ok = std::abs(x.dot(err)) <= width * est.design().weighted_norm(x);
    }
    if (probes_ok) ++out.covered_on_probes;
  }
  return out;
}

/// Deterministic chain s_h = h with an explicit action table per step.
/// Rewards and costs are <phi, theta> and <phi, gamma>; action 0 is the baseline.
class TableEnv final : public SimulatedEnvironment {
 public:
  TableEnv(std::vector<std::vector<Vec>> table, Vec theta, Vec gamma, double tau,
           double sigma = 0.0)
      : table_(std::move(table)), theta_(std::move(theta)), gamma_(std::move(gamma)) {
    desc_.name = "table";
    desc_.d = static_cast<std::size_t>(theta_.size());
    desc_.horizon = table_.size();
    desc_.num_actions = table_.front().size();
    desc_.tau = tau;
    desc_.sigma = sigma;
    desc_.deterministic = true;
  }

  /// Single-step env whose actions carry the given rewards through phi = (r, 0).
  static TableEnv rewards(const std::vector<double>& r, double tau = 1.0) {
    std::vector<Vec> row;
    for (double x : r) row.push_back((Vec(2) << x, 0.0).finished());
    return TableEnv({row}, (Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 0.0, 1.0).finished(),
                    tau);
  }

  void mark_stochastic() { desc_.deterministic = false; }

  const EnvDescriptor& descriptor() const override { return desc_; }
  State initial_state() const override { return State{{1.0, 0, 0, 0}}; }
  void feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const override {
    check_action(a);
    out = table_.at(index(s))[a];
  }
  ActionId safe_baseline(const State&, std::size_t) const override { return 0; }
  std::vector<double> action_point(ActionId a) const override {
    return {static_cast<double>(a)};
  }
  State transition(const State& s, ActionId, std::size_t) const override {
    return State{{s.v[0] + 1.0, 0, 0, 0}};
  }
  double true_reward(const State& s, ActionId a, std::size_t) const override {
    return feature(s, a).dot(theta_);
  }
  CostVector true_costs(const State& s, ActionId a, std::size_t) const override {
    CostVector c;
    c.push(feature(s, a).dot(gamma_));
    return c;
  }
  SimOracle oracle() const override {
    SimOracle o;
    for (std::size_t h = 0; h < table_.size(); ++h) {
      o.theta_star.push_back(theta_);
      o.gamma_star.push_back({gamma_});
    }
    return o;
  }

 private:
  std::size_t index(const State& s) const {
    const auto i = static_cast<std::size_t>(s.v[0]);
    if (i < 1 || i > table_.size()) throw InputError("state outside the chain");
    return i - 1;
  }

  std::vector<std::vector<Vec>> table_;
  Vec theta_;
  Vec gamma_;
  EnvDescriptor desc_;
};

}  // namespace ncs::testing
