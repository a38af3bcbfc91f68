#include "flore/sketch/augmented_sketch.hpp"

#include <algorithm>

#include "flore/error.hpp"

namespace flore {

AugmentedSketch::AugmentedSketch(std::size_t filter_capacity, CountMin sketch)
    : capacity_(filter_capacity), sketch_(std::move(sketch)) {
  filter_.reserve(capacity_);
}

void AugmentedSketch::update(std::uint64_t h, std::int64_t value) {
  if (value < 0) throw ParameterError("augmented sketch rejects negative updates");
  for (auto& slot : filter_) {
    if (slot.key_hash == h) {
      slot.new_count += static_cast<std::uint64_t>(value);
      return;
    }
  }
  if (filter_.size() < capacity_) {
    filter_.push_back({h, static_cast<std::uint64_t>(value), 0});
    return;
  }
  sketch_.update(h, value);
  if (filter_.empty()) return;
  const std::uint64_t estimate = sketch_.query(h);
  auto smallest = std::min_element(filter_.begin(), filter_.end(),
                                   [](const Slot& a, const Slot& b) { return a.new_count < b.new_count; });
  if (estimate <= smallest->new_count) return;
  const std::uint64_t residual = smallest->new_count - smallest->old_count;
  if (residual > 0) sketch_.update(smallest->key_hash, static_cast<std::int64_t>(residual));
  *smallest = Slot{h, estimate, estimate};
  ++exchanges_;
}

double AugmentedSketch::query(std::uint64_t h) const {
  if (auto slot = resident(h)) return static_cast<double>(slot->new_count);
  return sketch_.query(h);
}

std::optional<AugmentedSketch::Slot> AugmentedSketch::resident(std::uint64_t h) const {
  for (const auto& slot : filter_)
    if (slot.key_hash == h) return slot;
  return std::nullopt;
}

}  // namespace flore
