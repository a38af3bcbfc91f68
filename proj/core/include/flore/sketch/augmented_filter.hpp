#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flore {

enum class FilterCase {
  kHit,      // resident fingerprint, counter += v
  kInstall,  // empty entry took (key, v)
  kRouted,   // vote cast, no eviction: (key, v) spills to the shared sketch
  kEvicted,  // vote cast and won: minimum entry spills, (key, v) installed
};

struct FilterOutcome {
  FilterCase kind = FilterCase::kHit;
  bool spilled = false;
  std::uint64_t spill_hash = 0;
  std::uint32_t spill_value = 0;
};

/// Ostracism filter: `arrays` hash-indexed arrays, each one negative-vote
/// cell plus `entries` dedicated (fingerprint, counter) slots. Entries hold
/// the full 64-bit key hash so that an evicted key can be re-hashed into the
/// Count-Min exactly as if it had been routed there directly.
class AugmentedFilter {
 public:
  static constexpr std::size_t kDefaultEntries = 7;
  static constexpr double kDefaultThreshold = 8.0;

  AugmentedFilter() = default;
  AugmentedFilter(std::size_t arrays, std::size_t entries, double threshold, std::uint64_t seed);

  /// Bytes per array: a 4-byte vote plus 12 bytes per entry.
  static constexpr std::size_t array_bytes(std::size_t entries) { return 4 + 12 * entries; }

  FilterOutcome insert(std::uint64_t h, std::uint32_t value);
  /// Stored counter on fingerprint match, else 0.
  std::uint32_t query(std::uint64_t h) const noexcept;

  std::size_t arrays() const noexcept { return votes_.size(); }
  std::size_t entries() const noexcept { return entries_; }
  double threshold() const noexcept { return threshold_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t array_of(std::uint64_t h) const noexcept;

  std::uint32_t vote(std::size_t array) const { return votes_.at(array); }
  /// Sum of every dedicated counter.
  std::uint64_t resident_mass() const noexcept;
  std::size_t occupied() const noexcept;

  /// Calls visit(hash, count) for every occupied entry.
  template <typename F>
  void for_each(F&& visit) const {
    for (std::size_t i = 0; i < counts_.size(); ++i)
      if (counts_[i] != 0) visit(fingerprints_[i], counts_[i]);
  }

  std::span<const std::uint32_t> votes() const noexcept { return votes_; }
  std::span<const std::uint64_t> fingerprints() const noexcept { return fingerprints_; }
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }
  void assign(std::span<const std::uint32_t> votes, std::span<const std::uint64_t> fingerprints,
              std::span<const std::uint32_t> counts);

 private:
  std::size_t entries_ = kDefaultEntries;
  double threshold_ = kDefaultThreshold;
  std::uint64_t seed_ = 0;
  std::vector<std::uint32_t> votes_;
  std::vector<std::uint64_t> fingerprints_;
  std::vector<std::uint32_t> counts_;  // 0 marks an empty entry
};

}  // namespace flore
