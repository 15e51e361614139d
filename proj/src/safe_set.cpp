#include "ncs/safe_set.hpp"

#include <cmath>

#include "ncs/errors.hpp"

namespace ncs {

double beta2(double sigma, std::size_t d, std::size_t K, std::size_t H, double lambda,
             double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)", "agent.delta");
  if (K * H < 1) throw ConfigError("K*H must be at least 1", "agent.k");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive", "agent.lambda");
  if (sigma < 0.0) throw ConfigError("sigma must be nonnegative", "env.sigma");
  const double kh = static_cast<double>(K) * static_cast<double>(H);
  const double dd = static_cast<double>(d);
  return sigma * std::sqrt(dd * std::log((2.0 + 2.0 * kh / lambda) / delta)) +
         std::sqrt(lambda * dd);
}

SafeSetEstimate::SafeSetEstimate(std::size_t d, double lambda, double beta2, double tau)
    : estimator_(d, lambda), beta2_(beta2), tau_(tau) {
  if (!(beta2 >= 0.0)) throw ConfigError("beta2 must be nonnegative", "agent.beta2");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive", "env.tau");
}

double SafeSetEstimate::width(const Vec& dphi) const {
  return beta2_ * estimator_.design().weighted_norm(dphi);
}

double SafeSetEstimate::score(const Vec& dphi) const {
  require_finite(dphi, estimator_.dim(), "membership_score");
  return dphi.dot(estimator_.estimate()) + width(dphi);
}

void SafeSetEstimate::observe_cost(const Vec& dphi, double noisy_cost) {
  estimator_.observe(dphi, noisy_cost);
}

}  // namespace ncs
