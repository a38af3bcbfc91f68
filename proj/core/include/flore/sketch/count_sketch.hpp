#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flore/sketch/hash.hpp"

namespace flore {

/// Count Sketch: signed counters, C[l, h_l(x)] += g_l(x) * v; the estimate
/// is the median over rows of g_l(x) * C[l, h_l(x)].
class CountSketch {
 public:
  CountSketch() = default;
  CountSketch(std::size_t rows, std::size_t width, std::uint64_t seed);
  explicit CountSketch(HashFamily hash);

  const HashFamily& hash() const noexcept { return hash_; }
  std::size_t rows() const noexcept { return hash_.rows(); }
  std::size_t width() const noexcept { return hash_.width(); }

  void update(std::uint64_t h, std::int64_t value);
  double query(std::uint64_t h) const;
  /// Single-row estimator g_l(x) * C[l, h_l(x)].
  double row_estimate(std::size_t row, std::uint64_t h) const;

  void update_buckets(std::span<const std::uint32_t> buckets, std::span<const int> signs, std::int64_t value);
  double query_buckets(std::span<const std::uint32_t> buckets, std::span<const int> signs) const;

  std::span<const std::int32_t> counters() const noexcept { return counters_; }
  std::vector<double> flatten() const { return {counters_.begin(), counters_.end()}; }

 private:
  HashFamily hash_;
  std::vector<std::int32_t> counters_;
};

double median_of(std::span<double> values);

}  // namespace flore
