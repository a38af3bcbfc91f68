#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace flore {

enum class Ensemble { kBernoulli, kFourier, kGaussian, kIncoherence };

std::string to_string(Ensemble kind);
Ensemble parse_ensemble(std::string_view name);

struct DenseEnsembleSpec {
  Ensemble kind = Ensemble::kGaussian;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Dense m x N sensing matrix scaled so that E||Ax||^2 = ||x||^2 for unit x.
///   bernoulli    iid +-1/sqrt(m)
///   gaussian     iid N(0, 1/m)
///   fourier      m random rows of the real N-point Fourier basis
///                (cos/sin rows, orthonormal), times sqrt(N/m)
///   incoherence  m rows of a random orthonormal basis, times sqrt(N/m)
/// Throws ShapeError when m > N or either is zero.
Eigen::MatrixXd make_cs_matrix(const DenseEnsembleSpec& spec);

/// m orthonormal rows of a Haar-random N x N orthogonal matrix.
Eigen::MatrixXd random_orthonormal_rows(std::size_t m, std::size_t n, std::uint64_t seed);

/// Orthonormal real Fourier basis of R^N: row 0 is the constant, then
/// cos/sin pairs per frequency, and the alternating row when N is even.
Eigen::MatrixXd real_fourier_basis(std::size_t n);

}  // namespace flore
