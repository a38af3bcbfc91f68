#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flore {

/// Bit-array Bloom filter over 64-bit key hashes, k_bf probes by double
/// hashing. Bits are only ever set, so membership is monotone.
class BloomFilter {
 public:
  BloomFilter() = default;
  BloomFilter(std::size_t bits, std::size_t hashes, std::uint64_t seed);

  /// Sets the key's bits; returns true iff at least one of them was 0.
  bool insert(std::uint64_t h);
  bool contains(std::uint64_t h) const noexcept;

  std::size_t bit_count() const noexcept { return bits_; }
  std::size_t hash_count() const noexcept { return hashes_; }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Number of insert calls that reported a new key.
  std::uint64_t inserted() const noexcept { return inserted_; }
  std::size_t bytes() const noexcept { return words_.size() * 8; }

  /// Analytic false-positive rate (1 - e^{-k n / m})^k after n distinct keys.
  double expected_fpr(std::size_t n) const noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  void assign(std::span<const std::uint64_t> words, std::uint64_t inserted);

 private:
  std::size_t bits_ = 0;
  std::size_t hashes_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t inserted_ = 0;
  std::vector<std::uint64_t> words_;

  template <typename F>
  void probe(std::uint64_t h, F&& visit) const;
};

}  // namespace flore
