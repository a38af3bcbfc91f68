#include "flore/stream/types.hpp"

#include "flore/error.hpp"

namespace flore {

KeyIndex::KeyIndex(std::vector<Key> keys) {
  keys_.reserve(keys.size());
  for (auto& k : keys) {
    if (lookup_.contains(k)) throw FormatError("duplicate key in index: " + to_hex(k));
    insert(k);
  }
}

std::uint32_t KeyIndex::insert(const Key& key) {
  auto [it, inserted] = lookup_.try_emplace(key, static_cast<std::uint32_t>(keys_.size()));
  if (inserted) keys_.push_back(key);
  return it->second;
}

std::optional<std::uint32_t> KeyIndex::find(std::string_view key) const {
  auto it = lookup_.find(Key(key));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t KeyIndex::at(std::string_view key) const {
  auto found = find(key);
  if (!found) throw IndexError("unknown key " + to_hex(key));
  return *found;
}

KeyIndex KeyIndex::from_trace(const StreamTrace& trace) {
  KeyIndex index;
  for (const auto& item : trace.items) index.insert(item.key);
  return index;
}

FrequencyVector true_frequencies(const StreamTrace& trace, const KeyIndex& index) {
  FrequencyVector f(index.size(), 0.0);
  for (const auto& item : trace.items) f[index.at(item.key)] += static_cast<double>(item.value);
  return f;
}

Key encode_id(std::uint64_t id, std::size_t key_length) {
  Key key(key_length, '\0');
  for (std::size_t i = 0; i < key_length; ++i) {
    const std::size_t shift = 8 * (key_length - 1 - i);
    key[i] = shift < 64 ? static_cast<char>((id >> shift) & 0xff) : '\0';
  }
  return key;
}

std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xf]);
  }
  return out;
}

}  // namespace flore
