#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace flore {

/// 64-bit fingerprint of arbitrary key bytes (FNV-1a followed by a
/// splitmix64 avalanche). Every data-plane structure hashes this value.
std::uint64_t key_hash(std::string_view bytes) noexcept;

/// k seeded multiply-add-shift functions h_l : u64 -> [0, width).
///   h_l(x) = hi32(a_l * x + c_l) * width >> 32, a_l odd.
class HashFamily {
 public:
  HashFamily() = default;
  HashFamily(std::size_t rows, std::size_t width, std::uint64_t seed);

  std::size_t rows() const noexcept { return a_.size(); }
  std::size_t width() const noexcept { return width_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::uint32_t bucket(std::size_t row, std::uint64_t x) const noexcept {
    const std::uint64_t mixed = a_[row] * x + c_[row];
    return static_cast<std::uint32_t>(((mixed >> 32) * width_) >> 32);
  }

  /// Row-wise sign g_l(x) in {-1, +1} using the same construction with
  /// independent coefficients (top bit of the product).
  int sign(std::size_t row, std::uint64_t x) const noexcept {
    const std::uint64_t mixed = sa_[row] * x + sc_[row];
    return (mixed >> 63) ? 1 : -1;
  }

 private:
  std::size_t width_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> a_, c_, sa_, sc_;
};

}  // namespace flore
