#include "flore/sketch/bloom_filter.hpp"

#include <cmath>

#include "flore/error.hpp"
#include "flore/random.hpp"

namespace flore {

BloomFilter::BloomFilter(std::size_t bits, std::size_t hashes, std::uint64_t seed)
    : bits_(bits), hashes_(hashes), seed_(seed), words_((bits + 63) / 64, 0) {
  if (bits == 0) throw ParameterError("Bloom filter needs at least one bit");
  if (hashes == 0) throw ParameterError("Bloom filter needs at least one hash");
}

template <typename F>
void BloomFilter::probe(std::uint64_t h, F&& visit) const {
  const std::uint64_t h1 = splitmix64(h ^ seed_);
  const std::uint64_t h2 = splitmix64(h1 ^ 0x5bd1e9955bd1e995ULL) | 1ULL;
  for (std::size_t i = 0; i < hashes_; ++i) {
    const std::uint64_t mixed = h1 + i * h2;
    const auto bit = static_cast<std::size_t>((static_cast<unsigned __int128>(mixed) * bits_) >> 64);
    visit(bit);
  }
}

bool BloomFilter::insert(std::uint64_t h) {
  bool fresh = false;
  probe(h, [&](std::size_t bit) {
    auto& word = words_[bit >> 6];
    const std::uint64_t mask = 1ULL << (bit & 63);
    if (!(word & mask)) {
      fresh = true;
      word |= mask;
    }
  });
  if (fresh) ++inserted_;
  return fresh;
}

bool BloomFilter::contains(std::uint64_t h) const noexcept {
  bool all = true;
  probe(h, [&](std::size_t bit) {
    if (!(words_[bit >> 6] & (1ULL << (bit & 63)))) all = false;
  });
  return all;
}

double BloomFilter::expected_fpr(std::size_t n) const noexcept {
  const double k = static_cast<double>(hashes_);
  return std::pow(1.0 - std::exp(-k * static_cast<double>(n) / static_cast<double>(bits_)), k);
}

void BloomFilter::assign(std::span<const std::uint64_t> words, std::uint64_t inserted) {
  if (words.size() != words_.size()) throw ShapeError("Bloom word count mismatch");
  words_.assign(words.begin(), words.end());
  inserted_ = inserted;
}

}  // namespace flore
