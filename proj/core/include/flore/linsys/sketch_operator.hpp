#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "flore/sketch/hash.hpp"
#include "flore/stream/types.hpp"

namespace flore {

enum class OperatorMode { kCountMin, kCountSketch };

/// Implicit m x N sketching matrix Φ with m = rows * width. Column i has one
/// nonzero per row band at r * width + h_r(key_i), equal to 1 (Count-Min)
/// or g_r(key_i) (Count Sketch). Immutable after construction.
class SketchOperator {
 public:
  SketchOperator() = default;
  SketchOperator(const HashFamily& hash, std::span<const std::uint64_t> key_hashes,
                 OperatorMode mode = OperatorMode::kCountMin);

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }
  std::size_t bands() const noexcept { return k_; }
  std::size_t width() const noexcept { return width_; }
  OperatorMode mode() const noexcept { return mode_; }

  /// Row index of column i's nonzero in band r.
  std::size_t row_of(std::size_t i, std::size_t r) const { return r * width_ + buckets_[i * k_ + r]; }
  double value_of(std::size_t i, std::size_t r) const { return signs_.empty() ? 1.0 : signs_[i * k_ + r]; }

  /// Column buckets, N x bands row-major (the layout `query_all` expects).
  std::span<const std::uint32_t> column_buckets() const noexcept { return buckets_; }

  std::vector<double> apply(std::span<const double> f) const;
  std::vector<double> apply_transpose(std::span<const double> b) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& b) const;

  /// Count-Min point queries for every column evaluated on counter vector b.
  std::vector<double> cm_query(std::span<const double> b) const;

  Eigen::MatrixXd materialize() const;
  Eigen::SparseMatrix<double, Eigen::RowMajor> sparse() const;

 private:
  std::size_t k_ = 0, width_ = 0, m_ = 0, n_ = 0;
  OperatorMode mode_ = OperatorMode::kCountMin;
  std::vector<std::uint32_t> buckets_;
  std::vector<std::int8_t> signs_;
};

/// Operator over every key of `index`, hashed exactly as the data plane
/// hashes them. Throws ParameterError when the index is empty.
SketchOperator build_operator(const HashFamily& hash, const KeyIndex& index,
                              OperatorMode mode = OperatorMode::kCountMin);

}  // namespace flore
