#include "flore/linsys/decomposition.hpp"

#include <limits>

#include <Eigen/SVD>

#include "flore/error.hpp"

namespace flore {

namespace {

void check_size(Eigen::Index n, bool allow_large) {
  if (n > kDenseSvdLimit && !allow_large)
    throw CapabilityError("dense SVD limited to N <= " + std::to_string(kDenseSvdLimit) +
                          "; pass allow_large to override");
}

Eigen::MatrixXd guarded_materialize(const SketchOperator& op, bool allow_large) {
  check_size(static_cast<Eigen::Index>(op.cols()), allow_large);
  return op.materialize();
}

}  // namespace

RangeNullProjector::RangeNullProjector(const Eigen::MatrixXd& phi, bool allow_large) : phi_(phi) {
  const Eigen::Index n = phi.cols();
  if (n == 0) throw ParameterError("cannot decompose against an empty operator");
  check_size(n, allow_large);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeFullV);
  sigma_ = svd.singularValues();
  const double top = sigma_.size() ? sigma_(0) : 0.0;
  const double tol = static_cast<double>(std::max(phi.rows(), phi.cols())) * std::numeric_limits<double>::epsilon() * top;
  rank_ = 0;
  while (rank_ < sigma_.size() && sigma_(rank_) > tol) ++rank_;
  const Eigen::MatrixXd& v = svd.matrixV();
  range_ = v.leftCols(rank_);
  null_ = v.rightCols(n - rank_);
}

RangeNullProjector::RangeNullProjector(const SketchOperator& op, bool allow_large)
    : RangeNullProjector(guarded_materialize(op, allow_large), allow_large) {}

Decomposition RangeNullProjector::decompose(const Eigen::VectorXd& f) const {
  if (f.size() != phi_.cols()) throw ShapeError("decompose: vector length does not match operator columns");
  Decomposition d;
  d.f_range = range_ * (range_.transpose() * f);
  d.f_null = null_ * (null_.transpose() * f);
  d.rank = rank_;
  d.null_image_inf = (phi_ * d.f_null).cwiseAbs().maxCoeff();
  d.cross_inner = d.f_range.dot(d.f_null);
  return d;
}

Decomposition decompose_range_null(const Eigen::MatrixXd& phi, const Eigen::VectorXd& f, bool allow_large) {
  return RangeNullProjector(phi, allow_large).decompose(f);
}

Decomposition decompose_range_null(const SketchOperator& op, const Eigen::VectorXd& f, bool allow_large) {
  return RangeNullProjector(op, allow_large).decompose(f);
}

}  // namespace flore
