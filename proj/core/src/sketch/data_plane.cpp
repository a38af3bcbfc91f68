#include "flore/sketch/data_plane.hpp"

#include <limits>

#include "flore/error.hpp"
#include "flore/random.hpp"
#include "flore/sketch/hash.hpp"

namespace flore {

DataPlaneConfig DataPlaneConfig::from_budget(const MemoryBudget& budget, std::size_t cm_rows, std::uint64_t seed) {
  DataPlaneConfig c;
  c.cm_rows = cm_rows;
  c.cm_width = budget.count_min / (4 * cm_rows);
  c.filter_arrays = budget.filter / AugmentedFilter::array_bytes(c.filter_entries);
  c.bloom_bits = budget.bloom * 8;
  c.seed = seed;
  c.validate();
  return c;
}

void DataPlaneConfig::validate() const {
  if (cm_rows == 0) throw ConfigError("count-min needs at least one row");
  if (cm_width == 0) throw ConfigError("count-min width is zero; budget too small for the row count");
  if (filter_entries == 0) throw ConfigError("filter arrays need at least one entry");
  if (!(threshold > 0.0)) throw ConfigError("eviction threshold must be positive");
  if (bloom_bits == 0) throw ConfigError("Bloom filter needs at least one bit");
  if (bloom_hashes == 0) throw ConfigError("Bloom filter needs at least one hash");
}

std::uint64_t DataPlaneConfig::cm_seed() const noexcept { return derive_seed(seed, 0); }
std::uint64_t DataPlaneConfig::bloom_seed() const noexcept { return derive_seed(seed, 1); }
std::uint64_t DataPlaneConfig::filter_seed() const noexcept { return derive_seed(seed, 2); }

FloreDataPlane::FloreDataPlane(const DataPlaneConfig& config)
    : config_((config.validate(), config)),
      cm_(config.cm_rows, config.cm_width, config.cm_seed()),
      bloom_(config.bloom_bits, config.bloom_hashes, config.bloom_seed()),
      filter_(config.filter_arrays, config.filter_entries, config.threshold, config.filter_seed()) {}

InsertResult FloreDataPlane::insert(const Key& key, std::int64_t value) {
  if (value <= 0 || value > std::numeric_limits<std::uint32_t>::max())
    throw ParameterError("data-plane values must be in [1, 2^32)");
  const std::uint64_t h = key_hash(key);
  InsertResult result;
  if (bloom_.insert(h)) {
    result.new_key = true;
    keys_.push_back(key);
    ++stats_.new_keys;
  }
  const FilterOutcome out = filter_.insert(h, static_cast<std::uint32_t>(value));
  result.kind = out.kind;
  switch (out.kind) {
    case FilterCase::kHit: ++stats_.hits; break;
    case FilterCase::kInstall: ++stats_.installs; break;
    case FilterCase::kRouted: ++stats_.routed; break;
    case FilterCase::kEvicted: ++stats_.evictions; break;
  }
  if (out.spilled) {
    cm_.update(out.spill_hash, out.spill_value);
    stats_.cm_mass += out.spill_value;
    result.cm_touched = true;
    result.cm_hash = out.spill_hash;
    result.cm_value = out.spill_value;
  }
  ++stats_.items;
  stats_.total_mass += static_cast<std::uint64_t>(value);
  return result;
}

void FloreDataPlane::insert(const StreamTrace& trace) {
  for (const auto& item : trace.items) insert(item.key, item.value);
}

std::uint32_t FloreDataPlane::filter_query(std::string_view key) const noexcept {
  return filter_.query(key_hash(key));
}

void FloreDataPlane::restore(const PlaneStats& stats, std::vector<Key> keys) {
  stats_ = stats;
  keys_ = std::move(keys);
}

SnapshotWindow::SnapshotWindow(std::size_t interval, std::size_t capacity) : interval_(interval), capacity_(capacity) {
  if (interval == 0) throw ConfigError("sampling interval must be positive");
  if (capacity == 0) throw ConfigError("window length must be positive");
}

void SnapshotWindow::push(CounterSnapshot snapshot) {
  window_.push_back(std::move(snapshot));
  while (window_.size() > capacity_) window_.pop_front();
}

}  // namespace flore
