#pragma once

#include <cstddef>
#include <vector>

#include "ncs/mdp.hpp"

namespace ncs {

/// Symmetric saturation clamp(x, -v_max, v_max).
double f_saturate(double x, double v_max);

struct MergeEnvConfig {
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double v_ref = 0.001;
  double kappa1 = 100000.0;
  double kappa2 = 0.5;
  double y_min = -0.3;
  double y_max = 1.0 / 3.0;
  double collav_low = 1.0 / 16.0;
  double collav_high = 1.0 / 4.0;
  double grid_step = 1.0 / 8.0;
  // Forward-only longitudinal control: with braking allowed the clamped
  // progress reward is flat at 0 over a large region, which the linear Q
  // model cannot represent and optimism drives the agent into.
  double ux_min = 0.0;
  double ux_max = 0.5;
  // Wide enough that the lane-centering baseline exists at every state
  // reachable under lane-safe play (|y + vy| <= 13/16).
  double uy_min = -2.0;
  double uy_max = 2.0;
  std::size_t horizon = 3;
  double v_max = 0.5;
  double tau = 0.5;
  double sigma = 0.01;
  bool collav = true;
  // Declared bound L on |phi|; features are normalized so that L = 1 holds.
  double feature_norm_bound = 1.0;

  /// Throws ConfigError on an empty grid or an inconsistent lane.
  void validate() const;
  /// Bound on the raw feature norm over states visited at steps 1..H:
  /// |x|, |y| <= (H-1) v_max, |v| <= v_max, controls within their ranges.
  double feature_normalization() const;
};

/// Lane-merging car. State (x, y, vx, vy), action (ux, uy) on a grid.
///
/// Dynamics: v' = f(v + alpha u), then position += v'. Features are
/// [x, y, vx, vy, ux, uy] divided by feature_normalization().
///
/// Lane keeping is two-sided: with the linearized next lateral position
/// y'_lin = y + vy + alpha2 * uy, the costs
///   c_upper = tau * y'_lin / y_max,   c_lower = tau * y'_lin / y_min
/// are linear in phi and satisfy c <= tau  <=>  y_min <= y'_lin <= y_max.
/// The baseline keeps the longitudinal command of the reference policy
/// ((v_ref - vx)/kappa1, snapped to the grid) and steers y'_lin back to 0,
/// which zeroes both costs.
///
/// At the first step a collision-avoidance mask removes actions whose
/// post-action speed sum |vx' + vy'| falls in [collav_low, collav_high]
/// (disabled in the star-convex variant).
///
/// Reward is normalized forward progress clamp(vx' / v_max, 0, 1).
class MergeEnv final : public SimulatedEnvironment {
 public:
  explicit MergeEnv(MergeEnvConfig cfg);

  const EnvDescriptor& descriptor() const override { return desc_; }
  State initial_state() const override { return State{}; }
  void feature_into(const State& s, ActionId a, Eigen::Ref<Vec> out) const override;
  ActionId safe_baseline(const State& s, std::size_t h) const override;
  bool admissible(const State& s, std::size_t h, ActionId a) const override;
  std::vector<double> action_point(ActionId a) const override;

  State transition(const State& s, ActionId a, std::size_t h) const override;
  double true_reward(const State& s, ActionId a, std::size_t h) const override;
  CostVector true_costs(const State& s, ActionId a, std::size_t h) const override;
  SimOracle oracle() const override;

  // Components, exposed individually.
  State merge_step(const State& s, double ux, double uy) const;
  bool collav_mask(const State& s, std::size_t h, double ux, double uy) const;
  double merge_reward(const State& s, double ux) const;
  CostVector merge_lane_costs(const State& s, double uy) const;
  double linearized_next_y(const State& s, double uy) const;

  ActionId action_id(double ux, double uy) const;  // nearest grid action
  double ux_of(ActionId a) const { return ux_grid_.at(a / uy_grid_.size()); }
  double uy_of(ActionId a) const { return uy_grid_.at(a % uy_grid_.size()); }
  const MergeEnvConfig& config() const noexcept { return cfg_; }
  double normalization() const noexcept { return norm_; }

 private:
  static std::size_t nearest(const std::vector<double>& grid, double u);

  MergeEnvConfig cfg_;
  EnvDescriptor desc_;
  std::vector<double> ux_grid_;
  std::vector<double> uy_grid_;
  double norm_;
};

/// Same scenario with the collision-avoidance mask removed.
MergeEnv star_convex_variant(MergeEnvConfig cfg);

}  // namespace ncs
