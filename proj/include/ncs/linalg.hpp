#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace ncs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Regularized design matrix Lambda = lambda*I + sum x x^T together with its
/// inverse, maintained under rank-one updates.
///
/// The inverse is updated with the Sherman-Morrison identity (O(d^2)) and
/// refreshed from scratch every kRefreshInterval updates so that drift stays
/// below 1e-8 in max norm.
class PrecisionMatrix {
 public:
  static constexpr std::size_t kRefreshInterval = 4096;

  /// Throws ConfigError if dim == 0 or lambda is not a positive finite number.
  PrecisionMatrix(std::size_t dim, double lambda);

  /// Lambda += x x^T. Throws InputError on a dimension mismatch or a
  /// non-finite entry.
  void rank_one_update(const Vec& x);

  /// sqrt(v^T Lambda^{-1} v).
  double weighted_norm(const Vec& v) const;

  std::size_t dim() const noexcept { return dim_; }
  double lambda() const noexcept { return lambda_; }
  std::size_t count() const noexcept { return count_; }
  const Mat& matrix() const noexcept { return mat_; }
  const Mat& inverse() const noexcept { return inv_; }

 private:
  void refresh_inverse();

  std::size_t dim_;
  double lambda_;
  Mat mat_;
  Mat inv_;
  std::size_t count_ = 0;
};

/// Online ridge regression: theta = (lambda*I + sum x x^T)^{-1} sum x*y.
class RlsEstimator {
 public:
  RlsEstimator(std::size_t dim, double lambda);

  void observe(const Vec& x, double y);

  /// Cached; recomputed only after new observations.
  const Vec& estimate() const;

  const PrecisionMatrix& design() const noexcept { return design_; }
  const Vec& moment() const noexcept { return moment_; }
  std::size_t dim() const noexcept { return design_.dim(); }

 private:
  PrecisionMatrix design_;
  Vec moment_;
  mutable Vec cached_;
  mutable bool dirty_ = false;
};

/// Throws InputError if v has the wrong size or a non-finite entry.
void require_finite(const Vec& v, std::size_t dim, const char* what);

}  // namespace ncs
