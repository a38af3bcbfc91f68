#include "flore/linsys/omp.hpp"

#include <cmath>

#include "flore/error.hpp"

namespace flore {

OmpResult omp_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, std::size_t s_max, double residual_tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw ShapeError("omp: b length does not match matrix rows");
  if (s_max > static_cast<std::size_t>(m)) throw ParameterError("omp: s_max must not exceed m");
  if (!a.allFinite() || !b.allFinite()) throw NumericError("omp: non-finite input");

  OmpResult out;
  out.x = Eigen::VectorXd::Zero(n);
  const auto cap = static_cast<Eigen::Index>(s_max);
  Eigen::MatrixXd q(m, cap);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(cap, cap);
  std::vector<bool> excluded(static_cast<std::size_t>(n), false);
  Eigen::VectorXd residual = b;
  Eigen::Index t = 0;

  while (t < cap && residual.norm() > residual_tol) {
    const Eigen::VectorXd corr = a.transpose() * residual;
    Eigen::Index pick = -1;
    double best = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (excluded[static_cast<std::size_t>(j)]) continue;
      const double c = std::abs(corr(j));
      if (c > best) {
        best = c;
        pick = j;
      }
    }
    ++out.iterations;
    if (pick < 0) break;
    excluded[static_cast<std::size_t>(pick)] = true;

    Eigen::VectorXd v = a.col(pick);
    const double col_norm = v.norm();
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(t);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < t; ++i) {
        const double p = q.col(i).dot(v);
        coeff(i) += p;
        v -= p * q.col(i);
      }
    }
    const double nrm = v.norm();
    if (!(nrm > 1e-12 * col_norm)) continue;  // dependent on the current support
    q.col(t) = v / nrm;
    r.block(0, t, t, 1) = coeff;
    r(t, t) = nrm;
    residual -= q.col(t).dot(residual) * q.col(t);
    out.support.push_back(pick);
    ++t;
  }

  if (t > 0) {
    const Eigen::VectorXd qtb = q.leftCols(t).transpose() * b;
    const Eigen::VectorXd c = r.topLeftCorner(t, t).triangularView<Eigen::Upper>().solve(qtb);
    for (Eigen::Index i = 0; i < t; ++i) out.x(out.support[static_cast<std::size_t>(i)]) = c(i);
  }
  out.residual_norm = (b - a * out.x).norm();
  return out;
}

OmpResult omp_solve(const SketchOperator& op, const Eigen::VectorXd& b, std::size_t s_max, double residual_tol) {
  return omp_solve(op.materialize(), b, s_max, residual_tol);
}

}  // namespace flore
