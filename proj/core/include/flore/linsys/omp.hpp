#pragma once

#include <vector>

#include <Eigen/Dense>

#include "flore/linsys/sketch_operator.hpp"

namespace flore {

struct OmpResult {
  Eigen::VectorXd x;                   // dense solution, zero off the support
  std::vector<Eigen::Index> support;   // in selection order
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

/// Orthogonal Matching Pursuit. Each step selects the column with the largest
/// |A^T r| (lowest index on ties), extends a Gram-Schmidt QR of the selected
/// columns and refits by least squares. Stops after s_max atoms or when
/// ||r||_2 <= residual_tol. Throws ParameterError when s_max > m and
/// NumericError on non-finite input.
OmpResult omp_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, std::size_t s_max, double residual_tol);
OmpResult omp_solve(const SketchOperator& op, const Eigen::VectorXd& b, std::size_t s_max, double residual_tol);

}  // namespace flore
