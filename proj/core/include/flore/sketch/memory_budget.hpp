#pragma once

#include <cstddef>

namespace flore {

struct MemoryBudget {
  std::size_t total = 0;
  std::size_t bloom = 0;
  std::size_t count_min = 0;
  std::size_t filter = 0;
};

inline constexpr std::size_t kMinBudgetBytes = 1024;
inline constexpr std::size_t kCountMinCapBytes = 256 * 1024;
inline constexpr double kBloomBitsPerKey = 9.6;

/// Splits `total_bytes`: half to the Bloom filter (capped at 9.6 bits per
/// expected key when `expected_keys` > 0), a quarter to the Count-Min
/// (capped at 256 KB), and everything left to the augmented filter.
/// Throws ConfigError below 1 KB.
MemoryBudget allocate_memory(std::size_t total_bytes, std::size_t expected_keys);

}  // namespace flore
