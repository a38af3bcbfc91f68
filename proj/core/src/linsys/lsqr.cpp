#include "flore/linsys/lsqr.hpp"

#include <cmath>

#include "flore/error.hpp"

namespace flore {

LinearMap LinearMap::of(const Eigen::MatrixXd& a) {
  return {a.rows(), a.cols(), [&a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; },
          [&a](const Eigen::VectorXd& y) -> Eigen::VectorXd { return a.transpose() * y; }};
}

LinearMap LinearMap::of(const SketchOperator& op) {
  return {static_cast<Eigen::Index>(op.rows()), static_cast<Eigen::Index>(op.cols()),
          [&op](const Eigen::VectorXd& x) { return op.apply(x); },
          [&op](const Eigen::VectorXd& y) { return op.apply_transpose(y); }};
}

LsqResult lsq_solve(const LinearMap& a, const Eigen::VectorXd& b, std::size_t max_iters, double tol) {
  if (b.size() != a.rows) throw ShapeError("lsq: b length does not match operator rows");
  if (!b.allFinite()) throw NumericError("lsq: non-finite right-hand side");
  LsqResult out;
  out.x = Eigen::VectorXd::Zero(a.cols);

  const double bnorm = b.norm();
  double beta = bnorm;
  if (beta == 0.0) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXd u = b / beta;
  Eigen::VectorXd v = a.apply_transpose(u);
  double alpha = v.norm();
  if (alpha == 0.0) {
    out.converged = true;  // b is orthogonal to the range; x = 0 is optimal
    return out;
  }
  v /= alpha;
  Eigen::VectorXd w = v;
  double phibar = beta;
  double rhobar = alpha;
  double anorm_sq = 0.0;

  for (std::size_t it = 0; it < max_iters; ++it) {
    u = a.apply(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0) u /= beta;
    anorm_sq += alpha * alpha + beta * beta;
    v = a.apply_transpose(u) - beta * v;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;

    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;
    out.x += (phi / rho) * w;
    w = v - (theta / rho) * w;

    out.iterations = it + 1;
    out.residual_history.push_back(phibar);
    const double normal_residual = phibar * alpha * std::abs(c);
    if (!std::isfinite(phibar)) throw NumericError("lsq: iteration diverged");
    if (phibar <= tol * bnorm || normal_residual <= tol * std::sqrt(anorm_sq) * phibar || beta == 0.0 ||
        alpha == 0.0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

LsqResult lsq_solve(const SketchOperator& op, const Eigen::VectorXd& b, std::size_t max_iters, double tol) {
  return lsq_solve(LinearMap::of(op), b, max_iters, tol);
}

}  // namespace flore
