#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flore/random.hpp"
#include "flore/stream/types.hpp"

namespace flore {

enum class Distribution { kZipf, kZipfIcml, kPareto, kExponential, kLogNormal };

std::string_view to_string(Distribution d);
/// Accepts "zipf", "zipf-icml", "pareto", "exponential", "lognormal".
Distribution parse_distribution(std::string_view name);

struct SyntheticSpec {
  Distribution kind = Distribution::kZipf;
  std::size_t keys = 1000;
  std::uint64_t total_items = 100000;
  double alpha = 1.4;   // zipf skew / pareto shape
  double x_min = 1.0;   // pareto scale x_m
  double lambda = 1.0;  // exponential rate
  double mu = 0.0;      // lognormal location
  double sigma = 1.0;   // lognormal shape
  std::size_t key_length = 4;
  bool permute = true;
  std::uint64_t permutation_seed = 1;
  std::uint64_t rng_seed = 2;

  /// Throws ParameterError on non-positive shape parameters or N = 0.
  void validate() const;
};

struct GeneratedStream {
  StreamTrace trace;
  KeyIndex index;  // key i <-> id i
  FrequencyVector truth;
  /// Multiplier applied to raw samples before flooring (1 for zipf-icml).
  double scale = 1.0;
};

/// Unscaled per-key weights in rank order (before permutation and
/// discretization). Zipf variants are deterministic; the sampled
/// distributions draw one value per key from `rng`.
std::vector<double> draw_weights(const SyntheticSpec& spec, Rng& rng);

/// Builds a synthetic trace whose exact per-key totals equal `truth`.
/// Every item carries value 1; item order is a seeded shuffle.
GeneratedStream generate_stream(const SyntheticSpec& spec);

/// Materializes a stream with the given non-negative integer frequencies
/// (one unit item per count), keys encoded as ids 0..N-1, shuffled under `seed`.
StreamTrace materialize_stream(const FrequencyVector& frequencies, std::size_t key_length,
                               std::uint64_t seed, std::string name = "materialized");

/// Sample skewness (third standardized moment) of a frequency vector.
double skewness(const FrequencyVector& f);

}  // namespace flore
