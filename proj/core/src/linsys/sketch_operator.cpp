#include "flore/linsys/sketch_operator.hpp"

#include <limits>

#include "flore/error.hpp"
#include "flore/sketch/count_min.hpp"

namespace flore {

SketchOperator::SketchOperator(const HashFamily& hash, std::span<const std::uint64_t> key_hashes, OperatorMode mode)
    : k_(hash.rows()), width_(hash.width()), m_(hash.rows() * hash.width()), n_(key_hashes.size()), mode_(mode) {
  if (n_ == 0) throw ParameterError("sketch operator needs at least one key");
  buckets_.resize(n_ * k_);
  if (mode == OperatorMode::kCountSketch) signs_.resize(n_ * k_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t r = 0; r < k_; ++r) {
      buckets_[i * k_ + r] = hash.bucket(r, key_hashes[i]);
      if (!signs_.empty()) signs_[i * k_ + r] = static_cast<std::int8_t>(hash.sign(r, key_hashes[i]));
    }
  }
}

std::vector<double> SketchOperator::apply(std::span<const double> f) const {
  if (f.size() != n_) throw ShapeError("apply: expected length " + std::to_string(n_));
  std::vector<double> b(m_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (f[i] == 0.0) continue;
    for (std::size_t r = 0; r < k_; ++r) b[row_of(i, r)] += value_of(i, r) * f[i];
  }
  return b;
}

std::vector<double> SketchOperator::apply_transpose(std::span<const double> b) const {
  if (b.size() != m_) throw ShapeError("apply_transpose: expected length " + std::to_string(m_));
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t r = 0; r < k_; ++r) acc += value_of(i, r) * b[row_of(i, r)];
    y[i] = acc;
  }
  return y;
}

Eigen::VectorXd SketchOperator::apply(const Eigen::VectorXd& f) const {
  const auto out = apply(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())));
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXd SketchOperator::apply_transpose(const Eigen::VectorXd& b) const {
  const auto out = apply_transpose(std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

std::vector<double> SketchOperator::cm_query(std::span<const double> b) const {
  return query_all(b, k_, width_, buckets_);
}

Eigen::MatrixXd SketchOperator::materialize() const {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t r = 0; r < k_; ++r)
      phi(static_cast<Eigen::Index>(row_of(i, r)), static_cast<Eigen::Index>(i)) += value_of(i, r);
  return phi;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> SketchOperator::sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n_ * k_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t r = 0; r < k_; ++r)
      triplets.emplace_back(static_cast<int>(row_of(i, r)), static_cast<int>(i), value_of(i, r));
  Eigen::SparseMatrix<double, Eigen::RowMajor> phi(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
  phi.setFromTriplets(triplets.begin(), triplets.end());
  return phi;
}

SketchOperator build_operator(const HashFamily& hash, const KeyIndex& index, OperatorMode mode) {
  std::vector<std::uint64_t> hashes;
  hashes.reserve(index.size());
  for (const auto& key : index.keys()) hashes.push_back(key_hash(key));
  return SketchOperator(hash, hashes, mode);
}

}  // namespace flore
