#include "flore/sketch/memory_budget.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flore/error.hpp"

namespace flore {

MemoryBudget allocate_memory(std::size_t total_bytes, std::size_t expected_keys) {
  if (total_bytes < kMinBudgetBytes)
    throw ConfigError("memory budget of " + std::to_string(total_bytes) + " bytes is below the 1 KB minimum");
  MemoryBudget b;
  b.total = total_bytes;
  b.bloom = total_bytes / 2;
  if (expected_keys > 0) {
    const auto cap = static_cast<std::size_t>(std::ceil(kBloomBitsPerKey * static_cast<double>(expected_keys) / 8.0));
    b.bloom = std::min(b.bloom, cap);
  }
  b.count_min = std::min(total_bytes / 4, kCountMinCapBytes);
  b.filter = total_bytes - b.bloom - b.count_min;
  return b;
}

}  // namespace flore
