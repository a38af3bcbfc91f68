#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "flore/linsys/sketch_operator.hpp"

namespace flore {

/// Matrix-free linear map: y = A x and x = A^T y.
struct LinearMap {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_transpose;

  static LinearMap of(const Eigen::MatrixXd& a);
  static LinearMap of(const SketchOperator& op);
};

struct LsqResult {
  Eigen::VectorXd x;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // ||b - A x_k||_2 estimate per iteration
};

/// LSQR (Golub-Kahan bidiagonalization) for min ||Ax - b||_2 starting from
/// x = 0. Stops when ||r|| <= tol ||b|| or ||A^T r|| <= tol ||A|| ||r||.
/// The residual sequence is non-increasing; on hitting max_iters the last
/// (best) iterate is returned with converged = false.
LsqResult lsq_solve(const LinearMap& a, const Eigen::VectorXd& b, std::size_t max_iters, double tol);
LsqResult lsq_solve(const SketchOperator& op, const Eigen::VectorXd& b, std::size_t max_iters, double tol);

}  // namespace flore
