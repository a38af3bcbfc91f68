#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flore/gen/autodiff.hpp"
#include "flore/random.hpp"

namespace flore {

/// y = x W + b with W (in x out) and b (1 x out); parameters live in a store
/// and are referenced by index so models stay copyable.
struct Linear {
  std::size_t w = 0, b = 0;
  std::size_t in = 0, out = 0;

  /// Xavier-uniform weights scaled by `gain`, zero bias.
  static Linear create(ad::ParameterStore& store, const std::string& name, ad::ParamGroup group, std::size_t in,
                       std::size_t out, Rng& rng, double gain = 1.0);
  ad::Var forward(ad::Tape& t, ad::ParameterStore& store, ad::Var x) const;
  static std::size_t count(std::size_t in, std::size_t out) { return in * out + out; }
};

/// Linear -> ReLU -> Linear.
struct SubNet {
  Linear hidden, output;

  static SubNet create(ad::ParameterStore& store, const std::string& name, std::size_t in, std::size_t width,
                       std::size_t out, Rng& rng, double output_gain);
  ad::Var forward(ad::Tape& t, ad::ParameterStore& store, ad::Var x) const;
  static std::size_t count(std::size_t in, std::size_t width, std::size_t out) {
    return Linear::count(in, width) + Linear::count(width, out);
  }
};

enum class CouplingKind { kAffine, kAdditive, kNone };

std::string to_string(CouplingKind kind);
CouplingKind parse_coupling(const std::string& name);

/// Two complementary coupling layers over [u1, u2]:
///   v1 = u1 * exp(s1(u2)) + t1(u2),  v2 = u2 * exp(s2(v1)) + t2(v1)
/// with log-scales soft-clamped to (-clamp, clamp). The additive form drops
/// the scales; kNone is the identity. Conditioning input, when present, is
/// appended to every subnet input.
struct CouplingBlock {
  CouplingKind kind = CouplingKind::kAffine;
  std::size_t d1 = 0, d2 = 0, cond = 0;
  double clamp = 2.0;
  SubNet s1, t1, s2, t2;

  static CouplingBlock create(ad::ParameterStore& store, const std::string& name, CouplingKind kind, std::size_t dim,
                              std::size_t hidden, std::size_t cond, double clamp, Rng& rng);
  ad::Var forward(ad::Tape& t, ad::ParameterStore& store, ad::Var u, ad::Var c) const;
  ad::Var inverse(ad::Tape& t, ad::ParameterStore& store, ad::Var v, ad::Var c) const;
  static std::size_t count(CouplingKind kind, std::size_t dim, std::size_t hidden, std::size_t cond);
};

/// Fixed pseudo-random column permutation.
struct Permutation {
  std::vector<Eigen::Index> forward_map, inverse_map;

  static Permutation create(std::size_t dim, std::uint64_t seed);
  ad::Var forward(ad::Tape& t, ad::Var x) const { return ad::permute_cols(t, x, forward_map); }
  ad::Var inverse(ad::Tape& t, ad::Var x) const { return ad::permute_cols(t, x, inverse_map); }
};

}  // namespace flore
