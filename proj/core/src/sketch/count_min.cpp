#include "flore/sketch/count_min.hpp"

#include <algorithm>
#include <limits>

#include "flore/error.hpp"

namespace flore {

namespace {

constexpr std::uint64_t kCounterMax = std::numeric_limits<std::uint32_t>::max();

std::uint32_t checked_add(std::uint32_t counter, std::int64_t value) {
  const std::uint64_t sum = static_cast<std::uint64_t>(counter) + static_cast<std::uint64_t>(value);
  if (sum > kCounterMax) throw SaturationError("32-bit counter overflow");
  return static_cast<std::uint32_t>(sum);
}

}  // namespace

CountMin::CountMin(std::size_t rows, std::size_t width, std::uint64_t seed)
    : CountMin(HashFamily(rows, width, seed)) {}

CountMin::CountMin(HashFamily hash) : hash_(std::move(hash)), counters_(hash_.rows() * hash_.width(), 0) {}

void CountMin::update(std::uint64_t h, std::int64_t value) {
  if (value < 0) throw ParameterError("Count-Min rejects negative updates");
  const std::size_t k = rows();
  for (std::size_t r = 0; r < k; ++r) {
    auto& c = counters_[r * width() + hash_.bucket(r, h)];
    c = checked_add(c, value);
  }
}

void CountMin::update_conservative(std::uint64_t h, std::int64_t value) {
  if (value <= 0) throw ParameterError("conservative update requires a positive value");
  std::uint32_t buckets[64];
  const std::size_t k = rows();
  if (k > 64) throw ParameterError("conservative update supports at most 64 rows");
  for (std::size_t r = 0; r < k; ++r) buckets[r] = hash_.bucket(r, h);
  update_buckets_conservative({buckets, k}, value);
}

std::uint32_t CountMin::query(std::uint64_t h) const noexcept {
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  const std::size_t k = rows();
  for (std::size_t r = 0; r < k; ++r) best = std::min(best, counters_[r * width() + hash_.bucket(r, h)]);
  return best;
}

void CountMin::update_buckets(std::span<const std::uint32_t> buckets, std::int64_t value) {
  if (value < 0) throw ParameterError("Count-Min rejects negative updates");
  if (buckets.size() != rows()) throw ShapeError("one bucket per row expected");
  for (std::size_t r = 0; r < buckets.size(); ++r) {
    auto& c = counters_.at(r * width() + buckets[r]);
    c = checked_add(c, value);
  }
}

void CountMin::update_buckets_conservative(std::span<const std::uint32_t> buckets, std::int64_t value) {
  if (value <= 0) throw ParameterError("conservative update requires a positive value");
  if (buckets.size() != rows()) throw ShapeError("one bucket per row expected");
  const std::uint32_t low = query_buckets(buckets);
  for (std::size_t r = 0; r < buckets.size(); ++r) {
    auto& c = counters_.at(r * width() + buckets[r]);
    if (c == low) c = checked_add(c, value);
  }
}

std::uint32_t CountMin::query_buckets(std::span<const std::uint32_t> buckets) const noexcept {
  std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
  for (std::size_t r = 0; r < buckets.size(); ++r) best = std::min(best, counters_[r * width() + buckets[r]]);
  return buckets.empty() ? 0 : best;
}

void CountMin::assign(std::span<const std::uint32_t> counters) {
  if (counters.size() != counters_.size()) throw ShapeError("counter array length mismatch");
  std::copy(counters.begin(), counters.end(), counters_.begin());
}

std::vector<double> CountMin::flatten() const { return {counters_.begin(), counters_.end()}; }

bool CountMin::empty() const noexcept {
  return std::all_of(counters_.begin(), counters_.end(), [](auto c) { return c == 0; });
}

void CountMin::clear() noexcept { std::fill(counters_.begin(), counters_.end(), 0); }

double instance_scale(std::span<const double> flat, std::size_t rows) {
  if (rows == 0 || flat.size() % rows != 0) throw ShapeError("counter vector not divisible into rows");
  const std::size_t width = flat.size() / rows;
  double scale = std::numeric_limits<double>::infinity();
  double overall = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = flat.subspan(r * width, width);
    const double row_max = *std::max_element(row.begin(), row.end());
    scale = std::min(scale, row_max);
    overall = std::max(overall, row_max);
  }
  if (overall <= 0.0) throw EmptySketchError("instance scale undefined for an all-zero sketch");
  return scale;
}

double instance_scale(const CountMin& cm) {
  const auto flat = cm.flatten();
  return instance_scale(flat, cm.rows());
}

std::vector<double> query_all(std::span<const double> flat, std::size_t rows, std::size_t width,
                              std::span<const std::uint32_t> column_buckets) {
  if (flat.size() != rows * width) throw ShapeError("flat counter length must equal rows * width");
  if (column_buckets.size() % rows != 0) throw ShapeError("bucket list not divisible by rows");
  const std::size_t n = column_buckets.size() / rows;
  std::vector<double> est(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) best = std::min(best, flat[r * width + column_buckets[i * rows + r]]);
    est[i] = best;
  }
  return est;
}

}  // namespace flore
