#pragma once
/// @file linalg.hpp
/// Dense LU factorization with a reusable factor and a 1-norm condition
/// estimate, plus small matrix diagnostics.

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "rbfkit/error.hpp"

namespace rbfkit {

inline constexpr double kNoConditionLimit = std::numeric_limits<double>::infinity();

/// Factor-once, solve-many. Throws ConditioningError when the matrix is
/// numerically singular or its condition estimate exceeds `max_condition`.
class DenseSolver {
 public:
  DenseSolver() = default;

  explicit DenseSolver(const Eigen::MatrixXd& a, double max_condition = kNoConditionLimit,
                       const std::string& what = "dense system") {
    if (a.rows() != a.cols()) throw ShapeError(what + " matrix is not square");
    if (!a.allFinite()) throw ConditioningError(what + " matrix has non-finite entries", kNaN());
    lu_.compute(a);
    const double rc = a.size() == 0 ? 1.0 : lu_.rcond();
    condition_ = (rc > 0.0 && std::isfinite(rc)) ? 1.0 / rc : std::numeric_limits<double>::infinity();
    // rcond can come back finite after a zero pivot, so bound it by the
    // pivot spread as well
    if (a.size() != 0) {
      const Eigen::VectorXd piv = lu_.matrixLU().diagonal().cwiseAbs();
      const double lo = piv.minCoeff();
      condition_ = std::max(condition_, lo > 0.0 ? piv.maxCoeff() / lo : std::numeric_limits<double>::infinity());
    }
    if (!std::isfinite(condition_)) throw ConditioningError(what + " matrix is singular", condition_);
    if (condition_ > max_condition) throw ConditioningError(what + " matrix is ill-conditioned", condition_);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const { return lu_.solve(rhs); }

  /// Estimated 1-norm condition number, at least 1.
  double condition() const { return std::max(condition_, 1.0); }

 private:
  static double kNaN() { return std::numeric_limits<double>::quiet_NaN(); }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double condition_ = 1.0;
};

/// max|A - A^T| / max|A|.
inline double symmetry_defect(const Eigen::MatrixXd& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace rbfkit
