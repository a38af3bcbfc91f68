#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "flore/sketch/count_min.hpp"

namespace flore {

/// Augmented Sketch baseline: a small exact pre-filter in front of a
/// Count-Min. When a key that is not in the full filter reaches a CM
/// estimate above the smallest filter count, the two exchange places; the
/// evicted key's count accumulated since residence is flushed to the CM.
class AugmentedSketch {
 public:
  struct Slot {
    std::uint64_t key_hash = 0;
    std::uint64_t new_count = 0;  // estimate including residence-period mass
    std::uint64_t old_count = 0;  // value at installation
  };

  AugmentedSketch(std::size_t filter_capacity, CountMin sketch);

  void update(std::uint64_t h, std::int64_t value);
  double query(std::uint64_t h) const;

  /// Filter slot of the key, if resident.
  std::optional<Slot> resident(std::uint64_t h) const;
  const std::vector<Slot>& filter() const noexcept { return filter_; }
  const CountMin& sketch() const noexcept { return sketch_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t exchanges() const noexcept { return exchanges_; }

  static constexpr std::size_t kSlotBytes = 16;  // 8-byte hash + two 4-byte counters

 private:
  std::size_t capacity_;
  std::vector<Slot> filter_;
  CountMin sketch_;
  std::size_t exchanges_ = 0;
};

}  // namespace flore
