#include "flore/sketch/count_sketch.hpp"

#include <algorithm>
#include <limits>

#include "flore/error.hpp"

namespace flore {

namespace {

std::int32_t checked_add(std::int32_t counter, std::int64_t delta) {
  const std::int64_t sum = static_cast<std::int64_t>(counter) + delta;
  if (sum > std::numeric_limits<std::int32_t>::max() || sum < std::numeric_limits<std::int32_t>::min())
    throw SaturationError("32-bit counter overflow");
  return static_cast<std::int32_t>(sum);
}

}  // namespace

double median_of(std::span<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CountSketch::CountSketch(std::size_t rows, std::size_t width, std::uint64_t seed)
    : CountSketch(HashFamily(rows, width, seed)) {}

CountSketch::CountSketch(HashFamily hash) : hash_(std::move(hash)), counters_(hash_.rows() * hash_.width(), 0) {}

void CountSketch::update(std::uint64_t h, std::int64_t value) {
  for (std::size_t r = 0; r < rows(); ++r) {
    auto& c = counters_[r * width() + hash_.bucket(r, h)];
    c = checked_add(c, hash_.sign(r, h) * value);
  }
}

double CountSketch::row_estimate(std::size_t row, std::uint64_t h) const {
  return static_cast<double>(hash_.sign(row, h)) * counters_[row * width() + hash_.bucket(row, h)];
}

double CountSketch::query(std::uint64_t h) const {
  std::vector<double> est(rows());
  for (std::size_t r = 0; r < rows(); ++r) est[r] = row_estimate(r, h);
  return median_of(est);
}

void CountSketch::update_buckets(std::span<const std::uint32_t> buckets, std::span<const int> signs,
                                 std::int64_t value) {
  if (buckets.size() != rows() || signs.size() != rows()) throw ShapeError("one bucket and sign per row expected");
  for (std::size_t r = 0; r < rows(); ++r) {
    auto& c = counters_.at(r * width() + buckets[r]);
    c = checked_add(c, signs[r] * value);
  }
}

double CountSketch::query_buckets(std::span<const std::uint32_t> buckets, std::span<const int> signs) const {
  if (buckets.size() != rows() || signs.size() != rows()) throw ShapeError("one bucket and sign per row expected");
  std::vector<double> est(rows());
  for (std::size_t r = 0; r < rows(); ++r) est[r] = static_cast<double>(signs[r]) * counters_.at(r * width() + buckets[r]);
  return median_of(est);
}

}  // namespace flore
