#include "flore/sketch/augmented_filter.hpp"

#include <limits>

#include "flore/error.hpp"
#include "flore/random.hpp"

namespace flore {

namespace {

std::uint32_t checked_add(std::uint32_t counter, std::uint32_t value) {
  const std::uint64_t sum = static_cast<std::uint64_t>(counter) + value;
  if (sum > std::numeric_limits<std::uint32_t>::max()) throw SaturationError("32-bit filter counter overflow");
  return static_cast<std::uint32_t>(sum);
}

}  // namespace

AugmentedFilter::AugmentedFilter(std::size_t arrays, std::size_t entries, double threshold, std::uint64_t seed)
    : entries_(entries),
      threshold_(threshold),
      seed_(seed),
      votes_(arrays, 0),
      fingerprints_(arrays * entries, 0),
      counts_(arrays * entries, 0) {
  if (entries == 0) throw ParameterError("filter arrays need at least one entry");
  if (!(threshold > 0.0)) throw ParameterError("eviction threshold must be positive");
}

std::size_t AugmentedFilter::array_of(std::uint64_t h) const noexcept {
  const std::uint64_t mixed = splitmix64(h ^ seed_);
  return static_cast<std::size_t>((static_cast<unsigned __int128>(mixed) * votes_.size()) >> 64);
}

FilterOutcome AugmentedFilter::insert(std::uint64_t h, std::uint32_t value) {
  if (value == 0) throw ParameterError("filter insert requires a positive value");
  if (votes_.empty()) return {FilterCase::kRouted, true, h, value};

  const std::size_t a = array_of(h);
  std::uint64_t* fp = fingerprints_.data() + a * entries_;
  std::uint32_t* cnt = counts_.data() + a * entries_;

  std::size_t empty = entries_;
  for (std::size_t j = 0; j < entries_; ++j) {
    if (cnt[j] != 0 && fp[j] == h) {
      cnt[j] = checked_add(cnt[j], value);
      return {FilterCase::kHit, false, 0, 0};
    }
    if (cnt[j] == 0 && empty == entries_) empty = j;
  }
  if (empty != entries_) {
    fp[empty] = h;
    cnt[empty] = value;
    return {FilterCase::kInstall, false, 0, 0};
  }

  votes_[a] = checked_add(votes_[a], value);
  std::size_t smallest = 0;
  for (std::size_t j = 1; j < entries_; ++j)
    if (cnt[j] < cnt[smallest]) smallest = j;
  const double lambda = static_cast<double>(votes_[a]) / static_cast<double>(cnt[smallest]);
  if (lambda > threshold_) {
    FilterOutcome out{FilterCase::kEvicted, true, fp[smallest], cnt[smallest]};
    fp[smallest] = h;
    cnt[smallest] = value;
    votes_[a] = 0;
    return out;
  }
  return {FilterCase::kRouted, true, h, value};
}

std::uint32_t AugmentedFilter::query(std::uint64_t h) const noexcept {
  if (votes_.empty()) return 0;
  const std::size_t a = array_of(h);
  for (std::size_t j = 0; j < entries_; ++j) {
    const std::size_t i = a * entries_ + j;
    if (counts_[i] != 0 && fingerprints_[i] == h) return counts_[i];
  }
  return 0;
}

std::uint64_t AugmentedFilter::resident_mass() const noexcept {
  std::uint64_t total = 0;
  for (auto c : counts_) total += c;
  return total;
}

std::size_t AugmentedFilter::occupied() const noexcept {
  std::size_t n = 0;
  for (auto c : counts_) n += c != 0;
  return n;
}

void AugmentedFilter::assign(std::span<const std::uint32_t> votes, std::span<const std::uint64_t> fingerprints,
                             std::span<const std::uint32_t> counts) {
  if (votes.size() != votes_.size() || fingerprints.size() != fingerprints_.size() ||
      counts.size() != counts_.size())
    throw ShapeError("filter array shape mismatch");
  votes_.assign(votes.begin(), votes.end());
  fingerprints_.assign(fingerprints.begin(), fingerprints.end());
  counts_.assign(counts.begin(), counts.end());
}

}  // namespace flore
