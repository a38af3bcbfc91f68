#pragma once

#include <Eigen/Dense>

#include "flore/linsys/sketch_operator.hpp"

namespace flore {

struct Decomposition {
  Eigen::VectorXd f_range;  // component in the row space of Φ
  Eigen::VectorXd f_null;   // component in the null space of Φ; invisible in b
  Eigen::Index rank = 0;
  double null_image_inf = 0.0;  // ||Φ f_null||_inf
  double cross_inner = 0.0;     // <f_range, f_null>
};

inline constexpr Eigen::Index kDenseSvdLimit = 4096;

/// Caches a full SVD of Φ and projects vectors onto its row space and null
/// space using the two orthonormal bases of V.
class RangeNullProjector {
 public:
  /// Throws CapabilityError when N exceeds kDenseSvdLimit and
  /// `allow_large` is false.
  explicit RangeNullProjector(const Eigen::MatrixXd& phi, bool allow_large = false);
  explicit RangeNullProjector(const SketchOperator& op, bool allow_large = false);

  Decomposition decompose(const Eigen::VectorXd& f) const;

  Eigen::Index rank() const noexcept { return rank_; }
  const Eigen::MatrixXd& range_basis() const noexcept { return range_; }
  const Eigen::MatrixXd& null_basis() const noexcept { return null_; }
  const Eigen::VectorXd& singular_values() const noexcept { return sigma_; }

 private:
  Eigen::MatrixXd phi_;
  Eigen::MatrixXd range_;
  Eigen::MatrixXd null_;
  Eigen::VectorXd sigma_;
  Eigen::Index rank_ = 0;
};

Decomposition decompose_range_null(const Eigen::MatrixXd& phi, const Eigen::VectorXd& f, bool allow_large = false);
Decomposition decompose_range_null(const SketchOperator& op, const Eigen::VectorXd& f, bool allow_large = false);

}  // namespace flore
