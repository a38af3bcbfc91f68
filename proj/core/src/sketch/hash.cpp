#include "flore/sketch/hash.hpp"

#include "flore/error.hpp"
#include "flore/random.hpp"

namespace flore {

std::uint64_t key_hash(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

HashFamily::HashFamily(std::size_t rows, std::size_t width, std::uint64_t seed)
    : width_(width), seed_(seed) {
  if (rows == 0) throw ParameterError("hash family needs at least one row");
  if (width == 0 || width > 0xffffffffULL) throw ParameterError("hash width must be in [1, 2^32)");
  a_.resize(rows);
  c_.resize(rows);
  sa_.resize(rows);
  sc_.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    a_[r] = derive_seed(seed, 4 * r) | 1ULL;
    c_[r] = derive_seed(seed, 4 * r + 1);
    sa_[r] = derive_seed(seed, 4 * r + 2) | 1ULL;
    sc_[r] = derive_seed(seed, 4 * r + 3);
  }
}

}  // namespace flore
