#pragma once

#include <cstdint>
#include <deque>
#include <string_view>
#include <vector>

#include "flore/sketch/augmented_filter.hpp"
#include "flore/sketch/bloom_filter.hpp"
#include "flore/sketch/count_min.hpp"
#include "flore/sketch/memory_budget.hpp"
#include "flore/stream/types.hpp"

namespace flore {

struct DataPlaneConfig {
  std::size_t cm_rows = 4;
  std::size_t cm_width = 0;
  std::size_t filter_arrays = 0;  // 0 disables the filter: every item goes to the Count-Min
  std::size_t filter_entries = AugmentedFilter::kDefaultEntries;
  double threshold = AugmentedFilter::kDefaultThreshold;
  std::size_t bloom_bits = 0;
  std::size_t bloom_hashes = 7;
  std::uint64_t seed = 0;

  /// Geometry that fits the byte split: 4-byte CM counters, filter arrays of
  /// AugmentedFilter::array_bytes(entries), one Bloom bit per budget bit.
  static DataPlaneConfig from_budget(const MemoryBudget& budget, std::size_t cm_rows, std::uint64_t seed);

  void validate() const;
  std::uint64_t cm_seed() const noexcept;
  std::uint64_t bloom_seed() const noexcept;
  std::uint64_t filter_seed() const noexcept;
  std::size_t cm_size() const noexcept { return cm_rows * cm_width; }
};

struct PlaneStats {
  std::uint64_t items = 0;
  std::uint64_t total_mass = 0;
  std::uint64_t cm_mass = 0;  // light-part mass inserted into the Count-Min
  std::uint64_t hits = 0;
  std::uint64_t installs = 0;
  std::uint64_t routed = 0;
  std::uint64_t evictions = 0;
  std::uint64_t new_keys = 0;
};

struct InsertResult {
  FilterCase kind = FilterCase::kHit;
  bool new_key = false;
  bool cm_touched = false;
  std::uint64_t cm_hash = 0;
  std::uint32_t cm_value = 0;
};

/// Bloom key tracking + Ostracism filter + Count-Min. Every arriving key is
/// identified against the Bloom filter first; keys seen for the first time
/// are recorded in arrival order for the control plane.
class FloreDataPlane {
 public:
  explicit FloreDataPlane(const DataPlaneConfig& config);

  InsertResult insert(const Key& key, std::int64_t value = 1);
  void insert(const StreamTrace& trace);

  std::uint32_t filter_query(std::string_view key) const noexcept;
  std::uint32_t filter_query_hash(std::uint64_t h) const noexcept { return filter_.query(h); }

  /// Keys recorded so far, in first-identification order.
  const std::vector<Key>& recorded_keys() const noexcept { return keys_; }

  const DataPlaneConfig& config() const noexcept { return config_; }
  const CountMin& cm() const noexcept { return cm_; }
  const BloomFilter& bloom() const noexcept { return bloom_; }
  const AugmentedFilter& filter() const noexcept { return filter_; }
  const PlaneStats& stats() const noexcept { return stats_; }

  // Snapshot restore.
  CountMin& mutable_cm() noexcept { return cm_; }
  BloomFilter& mutable_bloom() noexcept { return bloom_; }
  AugmentedFilter& mutable_filter() noexcept { return filter_; }
  void restore(const PlaneStats& stats, std::vector<Key> keys);

 private:
  DataPlaneConfig config_;
  CountMin cm_;
  BloomFilter bloom_;
  AugmentedFilter filter_;
  PlaneStats stats_;
  std::vector<Key> keys_;
};

/// Count-Min counter vector captured at some stream position.
struct CounterSnapshot {
  std::uint64_t position = 0;
  std::vector<double> counters;
  FrequencyVector light_truth;  // optional, for supervised targets
};

/// FIFO of the most recent `capacity` snapshots taken every `interval`
/// updates.
class SnapshotWindow {
 public:
  SnapshotWindow(std::size_t interval, std::size_t capacity);

  /// True when `position` (items seen) falls on the sampling interval.
  bool due(std::uint64_t position) const noexcept { return position > 0 && position % interval_ == 0; }
  void push(CounterSnapshot snapshot);

  const std::deque<CounterSnapshot>& snapshots() const noexcept { return window_; }
  std::size_t size() const noexcept { return window_.size(); }
  std::size_t interval() const noexcept { return interval_; }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t interval_;
  std::size_t capacity_;
  std::deque<CounterSnapshot> window_;
};

}  // namespace flore
