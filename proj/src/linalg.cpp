#include "ncs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncs/errors.hpp"

namespace ncs {

void require_finite(const Vec& v, std::size_t dim, const char* what) {
  if (static_cast<std::size_t>(v.size()) != dim) {
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(dim) +
                     ", got " + std::to_string(v.size()));
  }
  if (!v.allFinite()) {
    throw InputError(std::string(what) + ": non-finite entry");
  }
}

PrecisionMatrix::PrecisionMatrix(std::size_t dim, double lambda) : dim_(dim), lambda_(lambda) {
  if (dim == 0) throw ConfigError("precision matrix dimension must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("ridge regularizer lambda must be positive");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  mat_ = lambda * Mat::Identity(n, n);
  inv_ = (1.0 / lambda) * Mat::Identity(n, n);
}

void PrecisionMatrix::rank_one_update(const Vec& x) {
  require_finite(x, dim_, "rank_one_update");
  const Vec u = inv_ * x;
  const double denom = 1.0 + x.dot(u);  // >= 1 since inv_ is PD
  mat_.noalias() += x * x.transpose();
  inv_.noalias() -= (u * u.transpose()) / denom;
  mat_ = 0.5 * (mat_ + mat_.transpose());
  inv_ = 0.5 * (inv_ + inv_.transpose());
  ++count_;
  if (count_ % kRefreshInterval == 0) refresh_inverse();
}

void PrecisionMatrix::refresh_inverse() {
  const auto n = static_cast<Eigen::Index>(dim_);
  inv_ = mat_.llt().solve(Mat::Identity(n, n));
  inv_ = 0.5 * (inv_ + inv_.transpose());
}

double PrecisionMatrix::weighted_norm(const Vec& v) const {
  require_finite(v, dim_, "weighted_norm");
  return std::sqrt(std::max(0.0, v.dot(inv_ * v)));
}

RlsEstimator::RlsEstimator(std::size_t dim, double lambda)
    : design_(dim, lambda),
      moment_(Vec::Zero(static_cast<Eigen::Index>(dim))),
      cached_(Vec::Zero(static_cast<Eigen::Index>(dim))) {}

void RlsEstimator::observe(const Vec& x, double y) {
  require_finite(x, design_.dim(), "rls_observe");
  if (!std::isfinite(y)) throw InputError("rls_observe: non-finite target");
  design_.rank_one_update(x);
  moment_ += y * x;
  dirty_ = true;
}

const Vec& RlsEstimator::estimate() const {
  if (dirty_) {
    cached_ = design_.inverse() * moment_;
    dirty_ = false;
  }
  return cached_;
}

}  // namespace ncs
