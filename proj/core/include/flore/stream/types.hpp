#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace flore {

/// Opaque fixed-length key bytes (4-byte item ids, 13-byte five-tuples, ...).
using Key = std::string;

struct StreamItem {
  Key key;
  std::int64_t value = 1;
};

/// Ordered one-pass input. Immutable once built.
struct StreamTrace {
  std::string name;
  std::size_t key_length = 0;
  std::vector<StreamItem> items;

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }
};

/// Per-key values indexed by KeyIndex position.
using FrequencyVector = std::vector<double>;

/// Ordered bijection key -> dense column index in [0, N).
class KeyIndex {
 public:
  KeyIndex() = default;
  explicit KeyIndex(std::vector<Key> keys);

  /// Returns the index of `key`, appending it if unseen.
  std::uint32_t insert(const Key& key);
  std::optional<std::uint32_t> find(std::string_view key) const;
  /// Throws IndexError for unknown keys.
  std::uint32_t at(std::string_view key) const;

  const Key& key(std::uint32_t index) const { return keys_.at(index); }
  const std::vector<Key>& keys() const noexcept { return keys_; }
  std::size_t size() const noexcept { return keys_.size(); }
  bool empty() const noexcept { return keys_.empty(); }

  /// Index assembled in first-appearance order over the trace.
  static KeyIndex from_trace(const StreamTrace& trace);

 private:
  std::vector<Key> keys_;
  std::unordered_map<Key, std::uint32_t> lookup_;
};

/// f[i] = sum of values of items whose key has index i.
FrequencyVector true_frequencies(const StreamTrace& trace, const KeyIndex& index);

/// Big-endian fixed-width encoding used for synthetic item ids.
Key encode_id(std::uint64_t id, std::size_t key_length = 4);

std::string to_hex(std::string_view bytes);

}  // namespace flore
