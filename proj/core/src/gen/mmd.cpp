#include "flore/gen/mmd.hpp"

#include <algorithm>
#include <vector>

#include "flore/error.hpp"

namespace flore {

namespace {

using ad::Mat;

struct MmdParts {
  double value = 0.0;
  Mat pooled;
  Mat dist;  // pooled squared distances
  double sigma2 = 1.0;
  Eigen::Index med_a = -1, med_b = -1;  // pair defining sigma2, -1 if guarded
};

void check(const Mat& x, const Mat& y) {
  if (x.cols() != y.cols()) throw ShapeError("mmd: sample dimensions differ");
  if (x.rows() < 2 || y.rows() < 2) throw ParameterError("mmd: need at least two samples per side");
}

double kernel(double d, double sigma2, std::span<const double> widths) {
  double k = 0.0;
  for (double c : widths) k += std::exp(-d / (2.0 * c * c * sigma2));
  return k / static_cast<double>(widths.size());
}

MmdParts compute(const Mat& x, const Mat& y, std::span<const double> widths) {
  check(x, y);
  MmdParts p;
  const Eigen::Index n = x.rows(), q = y.rows(), tot = n + q;
  p.pooled.resize(tot, x.cols());
  p.pooled << x, y;
  p.dist.resize(tot, tot);
  for (Eigen::Index a = 0; a < tot; ++a)
    for (Eigen::Index b = 0; b < tot; ++b) p.dist(a, b) = (p.pooled.row(a) - p.pooled.row(b)).squaredNorm();

  struct Pair {
    double d;
    Eigen::Index a, b;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(tot * (tot - 1) / 2));
  for (Eigen::Index a = 0; a < tot; ++a)
    for (Eigen::Index b = a + 1; b < tot; ++b) pairs.push_back({p.dist(a, b), a, b});
  const std::size_t mid = (pairs.size() - 1) / 2;
  std::nth_element(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(mid), pairs.end(),
                   [](const Pair& l, const Pair& r) { return l.d < r.d || (l.d == r.d && (l.a < r.a || (l.a == r.a && l.b < r.b))); });
  if (pairs[mid].d > 1e-12) {
    p.sigma2 = pairs[mid].d;
    p.med_a = pairs[mid].a;
    p.med_b = pairs[mid].b;
  }

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) sxx += kernel(p.dist(a, b), p.sigma2, widths);
  for (Eigen::Index a = 0; a < q; ++a)
    for (Eigen::Index b = 0; b < q; ++b) syy += kernel(p.dist(n + a, n + b), p.sigma2, widths);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < q; ++b) sxy += kernel(p.dist(a, n + b), p.sigma2, widths);
  const double dn = static_cast<double>(n), dq = static_cast<double>(q);
  p.value = sxx / (dn * dn) + syy / (dq * dq) - 2.0 * sxy / (dn * dq);
  return p;
}

}  // namespace

double mmd(const Mat& x, const Mat& y, std::span<const double> widths) { return compute(x, y, widths).value; }

ad::Var mmd(ad::Tape& t, ad::Var x, ad::Var y, std::span<const double> widths) {
  MmdParts parts = compute(t.value(x), t.value(y), widths);
  Mat out(1, 1);
  out(0, 0) = parts.value;
  std::vector<double> ws(widths.begin(), widths.end());
  const Eigen::Index n = t.value(x).rows();
  return t.push(std::move(out), {x, y}, [&t, x, y, n, ws, parts = std::move(parts)](const Mat& g) {
    const Eigen::Index tot = parts.pooled.rows();
    const Eigen::Index q = tot - n;
    const double dn = static_cast<double>(n), dq = static_cast<double>(q);
    const double s2 = parts.sigma2;
    const double inv_w = 1.0 / static_cast<double>(ws.size());
    Mat gz = Mat::Zero(tot, parts.pooled.cols());
    double d_sigma2 = 0.0;
    for (Eigen::Index a = 0; a < tot; ++a) {
      for (Eigen::Index b = 0; b < tot; ++b) {
        if (a == b) continue;
        const bool ax = a < n, bx = b < n;
        const double w = ax && bx ? 1.0 / (dn * dn) : (!ax && !bx ? 1.0 / (dq * dq) : -1.0 / (dn * dq));
        const double d = parts.dist(a, b);
        double dk_dd = 0.0, dk_ds = 0.0;
        for (double c : ws) {
          const double inv = 1.0 / (2.0 * c * c * s2);
          const double k = std::exp(-d * inv);
          dk_dd -= k * inv;
          dk_ds += k * d * inv / s2;
        }
        const double gd = g(0, 0) * w * dk_dd * inv_w;
        d_sigma2 += w * dk_ds * inv_w;
        const auto diff = parts.pooled.row(a) - parts.pooled.row(b);
        gz.row(a) += 2.0 * gd * diff;
        gz.row(b) -= 2.0 * gd * diff;
      }
    }
    if (parts.med_a >= 0) {
      const double gd = g(0, 0) * d_sigma2;
      const auto diff = parts.pooled.row(parts.med_a) - parts.pooled.row(parts.med_b);
      gz.row(parts.med_a) += 2.0 * gd * diff;
      gz.row(parts.med_b) -= 2.0 * gd * diff;
    }
    if (t.needs_grad(x)) t.grad(x) += gz.topRows(n);
    if (t.needs_grad(y)) t.grad(y) += gz.bottomRows(q);
  });
}

ad::Var moment_match(ad::Tape& t, ad::Var x, ad::Var y) {
  const Mat& vx = t.value(x);
  const Mat& vy = t.value(y);
  if (vx.cols() != vy.cols()) throw ShapeError("moment_match: sample dimensions differ");
  if (vx.rows() < 1 || vy.rows() < 1) throw ParameterError("moment_match: empty sample");
  const Eigen::RowVectorXd mx = vx.colwise().mean();
  const Eigen::RowVectorXd my = vy.colwise().mean();
  const Mat cx = vx.rowwise() - mx;
  const Mat cy = vy.rowwise() - my;
  const Eigen::RowVectorXd varx = cx.colwise().squaredNorm() / static_cast<double>(vx.rows());
  const Eigen::RowVectorXd vary = cy.colwise().squaredNorm() / static_cast<double>(vy.rows());
  const Eigen::RowVectorXd dm = mx - my;
  const Eigen::RowVectorXd dv = varx - vary;
  Mat out(1, 1);
  out(0, 0) = dm.squaredNorm() + dv.squaredNorm();
  return t.push(std::move(out), {x, y}, [&t, x, y, dm, dv, cx, cy](const Mat& g) {
    const double s = g(0, 0);
    if (t.needs_grad(x)) {
      const double nx = static_cast<double>(cx.rows());
      Mat gx = (cx.array().rowwise() * (4.0 * dv.array() / nx)).matrix();
      gx.rowwise() += 2.0 * dm / nx;
      t.grad(x) += s * gx;
    }
    if (t.needs_grad(y)) {
      const double ny = static_cast<double>(cy.rows());
      Mat gy = (cy.array().rowwise() * (-4.0 * dv.array() / ny)).matrix();
      gy.rowwise() -= 2.0 * dm / ny;
      t.grad(y) += s * gy;
    }
  });
}

}  // namespace flore
