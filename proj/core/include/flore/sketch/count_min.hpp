#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flore/sketch/hash.hpp"

namespace flore {

/// k x width array of 32-bit counters. Supports the plain Count-Min update
/// and the conservative update (CU) on the same layout. Single writer.
class CountMin {
 public:
  CountMin() = default;
  CountMin(std::size_t rows, std::size_t width, std::uint64_t seed);
  explicit CountMin(HashFamily hash);

  const HashFamily& hash() const noexcept { return hash_; }
  std::size_t rows() const noexcept { return hash_.rows(); }
  std::size_t width() const noexcept { return hash_.width(); }
  std::size_t size() const noexcept { return counters_.size(); }

  /// Adds `value` to the mapped counter of every row. value must be >= 0.
  void update(std::uint64_t h, std::int64_t value);
  /// Conservative update: raises only the counters that equal the current
  /// row-wise minimum for this key. value must be > 0.
  void update_conservative(std::uint64_t h, std::int64_t value);
  /// Minimum over the key's mapped counters.
  std::uint32_t query(std::uint64_t h) const noexcept;

  // Counter-level primitives; `buckets[r]` is the column in row r.
  void update_buckets(std::span<const std::uint32_t> buckets, std::int64_t value);
  void update_buckets_conservative(std::span<const std::uint32_t> buckets, std::int64_t value);
  std::uint32_t query_buckets(std::span<const std::uint32_t> buckets) const noexcept;

  std::uint32_t at(std::size_t row, std::size_t column) const { return counters_.at(row * width() + column); }
  /// Row-major counter array; b[r * width + c].
  std::span<const std::uint32_t> counters() const noexcept { return counters_; }
  /// Overwrites the counter array (snapshot restore). Length must match.
  void assign(std::span<const std::uint32_t> counters);

  /// Flattened counter vector b (row-major), as doubles.
  std::vector<double> flatten() const;

  bool empty() const noexcept;
  void clear() noexcept;

 private:
  HashFamily hash_;
  std::vector<std::uint32_t> counters_;
};

/// Minimum over rows of the maximum counter in each row. Throws
/// EmptySketchError when every counter is zero.
double instance_scale(std::span<const double> flat, std::size_t rows);
double instance_scale(const CountMin& cm);

/// Count-Min estimates for every row-major bucket list, computed from a
/// flattened counter vector: est[i] = min_r b[r * width + col_r(i)].
std::vector<double> query_all(std::span<const double> flat, std::size_t rows, std::size_t width,
                              std::span<const std::uint32_t> column_buckets);

}  // namespace flore
