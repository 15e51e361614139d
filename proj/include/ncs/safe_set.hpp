#pragma once

#include <cstddef>

#include "ncs/linalg.hpp"

namespace ncs {

/// Confidence width for the cost parameter:
///   sigma * sqrt(d * ln((2 + 2KH/lambda) / delta)) + sqrt(lambda * d).
/// Throws ConfigError unless 0 < delta < 1, K*H >= 1 and lambda > 0.
double beta2(double sigma, std::size_t d, std::size_t K, std::size_t H, double lambda,
             double delta);

/// Confidence-ellipsoid estimate of one cost parameter for one step index.
///
/// Regressors are feature displacements dphi = phi(s,a) - phi(s,a0_s) from the
/// baseline action. An action is a member of the estimated safe set when
///   <dphi, gamma_hat> + beta2 * |dphi|_{Lambda^{-1}} <= tau,
/// so the baseline (dphi = 0, score exactly 0) is always a member.
class SafeSetEstimate {
 public:
  SafeSetEstimate(std::size_t d, double lambda, double beta2, double tau);

  double score(const Vec& dphi) const;
  bool contains(const Vec& dphi) const { return score(dphi) <= tau_; }
  /// beta2 * |dphi|_{Lambda^{-1}}.
  double width(const Vec& dphi) const;

  void observe_cost(const Vec& dphi, double noisy_cost);

  const RlsEstimator& estimator() const noexcept { return estimator_; }
  double beta2() const noexcept { return beta2_; }
  double tau() const noexcept { return tau_; }

 private:
  RlsEstimator estimator_;
  double beta2_;
  double tau_;
};

}  // namespace ncs
