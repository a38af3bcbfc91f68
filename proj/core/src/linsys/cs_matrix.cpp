#include "flore/linsys/cs_matrix.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/QR>

#include "flore/error.hpp"
#include "flore/random.hpp"

namespace flore {

std::string to_string(Ensemble kind) {
  switch (kind) {
    case Ensemble::kBernoulli: return "bernoulli";
    case Ensemble::kFourier: return "fourier";
    case Ensemble::kGaussian: return "gaussian";
    case Ensemble::kIncoherence: return "incoherence";
  }
  return "unknown";
}

Ensemble parse_ensemble(std::string_view name) {
  if (name == "bernoulli" || name == "BM") return Ensemble::kBernoulli;
  if (name == "fourier" || name == "FM") return Ensemble::kFourier;
  if (name == "gaussian" || name == "GM") return Ensemble::kGaussian;
  if (name == "incoherence" || name == "IM") return Ensemble::kIncoherence;
  throw ParameterError("unknown matrix ensemble '" + std::string(name) + "'");
}

Eigen::MatrixXd random_orthonormal_rows(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m == 0 || n == 0 || m > n) throw ShapeError("need 0 < m <= N for an orthonormal row subset");
  Rng rng(seed);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  // Sign fix so the distribution is Haar rather than QR-convention dependent.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q.transpose();
}

Eigen::MatrixXd real_fourier_basis(std::size_t n) {
  if (n == 0) throw ShapeError("Fourier basis needs N > 0");
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd basis(nn, nn);
  const double dn = static_cast<double>(n);
  basis.row(0).setConstant(1.0 / std::sqrt(dn));
  Eigen::Index row = 1;
  for (std::size_t k = 1; 2 * k < n; ++k) {
    for (Eigen::Index j = 0; j < nn; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(j) / dn;
      basis(row, j) = std::sqrt(2.0 / dn) * std::cos(angle);
      basis(row + 1, j) = std::sqrt(2.0 / dn) * std::sin(angle);
    }
    row += 2;
  }
  if (n % 2 == 0)
    for (Eigen::Index j = 0; j < nn; ++j) basis(row, j) = (j % 2 ? -1.0 : 1.0) / std::sqrt(dn);
  return basis;
}

Eigen::MatrixXd make_cs_matrix(const DenseEnsembleSpec& spec) {
  if (spec.m == 0 || spec.n == 0) throw ShapeError("sensing matrix dimensions must be positive");
  if (spec.m > spec.n) throw ShapeError("sensing matrix needs m <= N");
  const auto m = static_cast<Eigen::Index>(spec.m);
  const auto n = static_cast<Eigen::Index>(spec.n);
  const double dm = static_cast<double>(spec.m);
  Rng rng(spec.seed);
  Eigen::MatrixXd a(m, n);
  switch (spec.kind) {
    case Ensemble::kBernoulli: {
      const double v = 1.0 / std::sqrt(dm);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i) a(i, j) = (rng.next() >> 63) ? v : -v;
      break;
    }
    case Ensemble::kGaussian: {
      const double sd = 1.0 / std::sqrt(dm);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i) a(i, j) = sd * rng.normal();
      break;
    }
    case Ensemble::kFourier: {
      const Eigen::MatrixXd basis = real_fourier_basis(spec.n);
      std::vector<Eigen::Index> order(spec.n);
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      rng.shuffle(std::span<Eigen::Index>(order));
      const double scale = std::sqrt(static_cast<double>(spec.n) / dm);
      for (Eigen::Index i = 0; i < m; ++i) a.row(i) = scale * basis.row(order[static_cast<std::size_t>(i)]);
      break;
    }
    case Ensemble::kIncoherence:
      a = std::sqrt(static_cast<double>(spec.n) / dm) * random_orthonormal_rows(spec.m, spec.n, spec.seed);
      break;
  }
  return a;
}

}  // namespace flore
