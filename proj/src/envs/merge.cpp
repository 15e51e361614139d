#include "ncs/envs/merge.hpp"

#include <algorithm>
#include <cmath>

#include "ncs/errors.hpp"

namespace ncs {

namespace {

std::vector<double> make_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

// Collav band edges are multiples of 1/16 like the speeds; compare with slack.
constexpr double kBandSlack = 1e-12;

}  // namespace

double f_saturate(double x, double v_max) { return std::clamp(x, -v_max, v_max); }

void MergeEnvConfig::validate() const {
  if (!(grid_step > 0.0)) throw ConfigError("merge.grid_step must be positive", "merge.grid_step");
  if (!(ux_min <= ux_max)) throw ConfigError("merge.ux_min exceeds merge.ux_max", "merge.ux_min");
  if (!(uy_min <= uy_max)) throw ConfigError("merge.uy_min exceeds merge.uy_max", "merge.uy_min");
  if (!(y_min < 0.0 && 0.0 < y_max)) {
    throw ConfigError("lane must satisfy y_min < 0 < y_max", "merge.y_min");
  }
  if (!(collav_low <= collav_high)) {
    throw ConfigError("merge.collav_low exceeds merge.collav_high", "merge.collav_low");
  }
  if (horizon < 1) throw ConfigError("merge.horizon must be >= 1", "merge.horizon");
  if (!(v_max > 0.0)) throw ConfigError("merge.v_max must be positive", "merge.v_max");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("env.tau must lie in (0, 1]", "env.tau");
  if (!(sigma >= 0.0)) throw ConfigError("env.sigma must be nonnegative", "env.sigma");
  if (!(feature_norm_bound > 0.0 && feature_norm_bound <= 1.0)) {
    throw ConfigError("feature norm bound must lie in (0, 1]", "merge.feature_norm_bound");
  }
  if (!(kappa1 > 0.0 && kappa2 > 0.0)) throw ConfigError("merge.kappa must be positive", "merge.kappa1");
}

double MergeEnvConfig::feature_normalization() const {
  const double pos = static_cast<double>(horizon - 1) * v_max;
  const double ux = std::max(std::abs(ux_min), std::abs(ux_max));
  const double uy = std::max(std::abs(uy_min), std::abs(uy_max));
  return std::sqrt(2.0 * pos * pos + 2.0 * v_max * v_max + ux * ux + uy * uy);
}

MergeEnv::MergeEnv(MergeEnvConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  ux_grid_ = make_grid(cfg_.ux_min, cfg_.ux_max, cfg_.grid_step);
  uy_grid_ = make_grid(cfg_.uy_min, cfg_.uy_max, cfg_.grid_step);
  if (ux_grid_.empty() || uy_grid_.empty()) throw ConfigError("empty control grid");
  norm_ = cfg_.feature_normalization();
  desc_.name = cfg_.collav ? "merge" : "merge-star";
  desc_.d = 6;
  desc_.horizon = cfg_.horizon;
  desc_.num_actions = ux_grid_.size() * uy_grid_.size();
  desc_.num_constraints = 2;
  desc_.tau = cfg_.tau;
  desc_.sigma = cfg_.sigma;
  desc_.feature_norm_bound = cfg_.feature_norm_bound;
  desc_.deterministic = true;
}

std::size_t MergeEnv::nearest(const std::vector<double>& grid, double u) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - u) < std::abs(grid[best] - u)) best = i;
  }
  return best;
}

ActionId MergeEnv::action_id(double ux, double uy) const {
  return nearest(ux_grid_, ux) * uy_grid_.size() + nearest(uy_grid_, uy);
}

std::vector<double> MergeEnv::action_point(ActionId a) const {
  check_action(a);
  return {ux_of(a), uy_of(a)};
}

void MergeEnv::feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const {
  check_action(a);
  const double inv = 1.0 / norm_;
  out << s.v[0] * inv, s.v[1] * inv, s.v[2] * inv, s.v[3] * inv, ux_of(a) * inv, uy_of(a) * inv;
}

ActionId MergeEnv::safe_baseline(const State& s, std::size_t) const {
  const double ux = (cfg_.v_ref - s.v[2]) / cfg_.kappa1;
  const double uy = -(s.v[1] + s.v[3]) / cfg_.alpha2;
  return action_id(ux, uy);
}

State MergeEnv::merge_step(const State& s, double ux, double uy) const {
  State n;
  n.v[2] = f_saturate(s.v[2] + cfg_.alpha1 * ux, cfg_.v_max);
  n.v[3] = f_saturate(s.v[3] + cfg_.alpha2 * uy, cfg_.v_max);
  n.v[0] = s.v[0] + n.v[2];
  n.v[1] = s.v[1] + n.v[3];
  return n;
}

bool MergeEnv::collav_mask(const State& s, std::size_t h, double ux, double uy) const {
  if (!cfg_.collav || h != 1) return true;
  const State n = merge_step(s, ux, uy);
  const double speed = std::abs(n.v[2] + n.v[3]);
  return !(speed >= cfg_.collav_low - kBandSlack && speed <= cfg_.collav_high + kBandSlack);
}

bool MergeEnv::admissible(const State& s, std::size_t h, ActionId a) const {
  check_action(a);
  return collav_mask(s, h, ux_of(a), uy_of(a));
}

State MergeEnv::transition(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  return merge_step(s, ux_of(a), uy_of(a));
}

double MergeEnv::merge_reward(const State& s, double ux) const {
  const double progress = f_saturate(s.v[2] + cfg_.alpha1 * ux, cfg_.v_max);
  return std::clamp(progress / cfg_.v_max, 0.0, 1.0);
}

double MergeEnv::linearized_next_y(const State& s, double uy) const {
  return s.v[1] + s.v[3] + cfg_.alpha2 * uy;
}

CostVector MergeEnv::merge_lane_costs(const State& s, double uy) const {
  const double y = linearized_next_y(s, uy);
  CostVector c;
  c.push(cfg_.tau * y / cfg_.y_max);
  c.push(cfg_.tau * y / cfg_.y_min);
  return c;
}

double MergeEnv::true_reward(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  return merge_reward(s, ux_of(a));
}

CostVector MergeEnv::true_costs(const State& s, ActionId a, std::size_t) const {
  check_action(a);
  return merge_lane_costs(s, uy_of(a));
}

SimOracle MergeEnv::oracle() const {
  // Reward is only piecewise linear (saturation, clamp); theta_star is its
  // linearization in the unsaturated forward-moving regime.
  Vec theta(6), up(6), lo(6);
  theta << 0.0, 0.0, 1.0 / cfg_.v_max, 0.0, cfg_.alpha1 / cfg_.v_max, 0.0;
  Vec lane(6);
  lane << 0.0, 1.0, 0.0, 1.0, 0.0, cfg_.alpha2;
  up = norm_ * (cfg_.tau / cfg_.y_max) * lane;
  lo = norm_ * (cfg_.tau / cfg_.y_min) * lane;
  SimOracle o;
  for (std::size_t h = 0; h < cfg_.horizon; ++h) {
    o.theta_star.push_back(norm_ * theta);
    o.gamma_star.push_back({up, lo});
  }
  return o;
}

MergeEnv star_convex_variant(MergeEnvConfig cfg) {
  cfg.collav = false;
  return MergeEnv(cfg);
}

}  // namespace ncs
