#pragma once

#include <cstdint>
#include <vector>

#include "flore/gen/autodiff.hpp"
#include "flore/gen/layers.hpp"

namespace flore {

struct ModelConfig {
  std::size_t keys = 0;          // N, tracked keys
  std::size_t counters = 0;      // m
  std::size_t latent = 48;       // d_f; split into d_b = 2/3 and d_z = 1/3
  std::size_t hidden = 64;       // coupling subnet width
  std::size_t blocks = 3;        // L
  std::size_t ae_hidden = 0;     // 0: single-layer encoders/decoder
  CouplingKind coupling = CouplingKind::kAffine;
  double clamp = 2.0;
  bool conditional = false;
  std::size_t segment_length = 0;  // conditional only; 0 means one segment of N
  std::size_t max_segments = 16;   // one-hot capacity of the condition input
  std::size_t cond_dim = 8;
  std::uint64_t seed = 0;

  /// Throws ConfigError on inconsistent widths.
  void validate() const;
  std::size_t d_b() const noexcept { return 2 * latent / 3; }
  std::size_t d_z() const noexcept { return latent - d_b(); }
  std::size_t seg_len() const noexcept { return conditional && segment_length ? segment_length : keys; }
  std::size_t segments() const noexcept { return (keys + seg_len() - 1) / seg_len(); }

  bool same_architecture(const ModelConfig& other) const noexcept;
};

/// Closed-form parameter count for the declared layer sizes.
std::size_t expected_parameter_count(const ModelConfig& config);

/// Generative recovery network: b-encoder, f-encoder/decoder and an
/// invertible coupling stack between them.
///   G([b, z])  = decode(flow([enc_b(b), z]))
///   G^-1(f)    = flow^-1(enc_f(f))
/// With conditioning, the key space is cut into equal segments processed as
/// separate rows that share every weight; a one-hot segment index feeds a
/// condition embedding appended to the coupling subnets' inputs.
class FloreModel {
 public:
  FloreModel() = default;
  explicit FloreModel(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  ad::ParameterStore& parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.scalar_count(); }

  // Tape builders. Row counts: b (B x m), z (B*S x d_z), f (B x N).
  ad::Var encode_b(ad::Tape& t, ad::Var b) const;
  ad::Var encode_f(ad::Tape& t, ad::Var f_segments) const;
  ad::Var decode(ad::Tape& t, ad::Var latent) const;
  /// Condition embedding for B*S rows, or Var{-1} when unconditional.
  ad::Var condition(ad::Tape& t, Eigen::Index batch) const;
  ad::Var flow(ad::Tape& t, ad::Var x, ad::Var cond, bool inverse) const;
  /// Returns the B x N generated vector.
  ad::Var generate(ad::Tape& t, ad::Var b, ad::Var z) const;
  /// decode(flow(latent)) reassembled into B x N.
  ad::Var generate_from_latent(ad::Tape& t, ad::Var latent) const;
  /// Returns the B*S x d_f latent [b-slot, z-slot].
  ad::Var invert(ad::Tape& t, ad::Var f) const;
  /// [enc_b(b) repeated per segment, z]: the flow input for (b, z).
  ad::Var prior_latent(ad::Tape& t, ad::Var b, ad::Var z) const;

  // Inference helpers (no gradient recording).
  ad::Mat generate(const ad::Mat& b, const ad::Mat& z) const;
  ad::Mat invert(const ad::Mat& f) const;
  ad::Mat flow_forward(const ad::Mat& latent) const;
  ad::Mat flow_inverse(const ad::Mat& latent) const;

  /// Appends one segment (conditional models only). Parameters unchanged.
  void add_segment();
  /// Grows N within the current segment capacity (conditional models).
  void set_keys(std::size_t keys);

 private:
  ModelConfig config_;
  mutable ad::ParameterStore params_;
  std::vector<Linear> enc_b_, enc_f_, dec_;
  Linear cond_;
  std::vector<CouplingBlock> blocks_;
  std::vector<Permutation> perms_;

  ad::Var run(ad::Tape& t, const std::vector<Linear>& layers, ad::Var x) const;
};

}  // namespace flore
