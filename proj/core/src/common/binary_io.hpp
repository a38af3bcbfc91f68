#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "flore/error.hpp"

namespace flore::detail {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <typename T>
  void put_array(std::span<const T> values) {
    put<std::uint64_t>(values.size());
    out_.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  }

  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  void put_magic(const char (&magic)[5]) { out_.write(magic, 4); }

  void check() const {
    if (!out_) throw FormatError("write failed");
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value{};
    read(&value, sizeof(T));
    return value;
  }

  template <typename T>
  std::vector<T> get_array(std::size_t expected = static_cast<std::size_t>(-1)) {
    const auto n = get<std::uint64_t>();
    if (expected != static_cast<std::size_t>(-1) && n != expected)
      throw CorruptionError("array length " + std::to_string(n) + " does not match header (" +
                            std::to_string(expected) + ")");
    if (n > (std::uint64_t{1} << 34) / sizeof(T)) throw CorruptionError("implausible array length");
    std::vector<T> values(n);
    read(values.data(), n * sizeof(T));
    return values;
  }

  std::string get_string() {
    const auto n = get<std::uint32_t>();
    if (n > (1u << 24)) throw CorruptionError("implausible string length");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }

  void expect_magic(const char (&magic)[5]) {
    char got[4];
    read(got, 4);
    if (std::memcmp(got, magic, 4) != 0) throw CorruptionError(std::string("bad magic, expected ") + magic);
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw CorruptionError("trailing bytes after payload");
  }

 private:
  std::istream& in_;

  void read(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw CorruptionError("unexpected end of data");
  }
};

}  // namespace flore::detail
