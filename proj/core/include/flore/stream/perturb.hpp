#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "flore/stream/types.hpp"

namespace flore {

enum class PerturbMode { kTemporal, kSpatial };

PerturbMode parse_perturb_mode(std::string_view name);

struct PerturbOptions {
  /// Fraction of keys touched per epoch is drawn uniformly from this range.
  double min_fraction = 0.10;
  double max_fraction = 0.20;
  /// Fraction of keys regarded as hot in spatial mode.
  double hot_fraction = 0.10;
};

/// Temporal: a sampled 10-20% of keys receive factor * N(0, sigma_i^2),
/// rounded and clamped at zero; sigma_i defaults to sqrt(f_i) (the
/// epoch-to-epoch spread of a Poisson count) unless `sigma` is given.
/// factor must lie in [0, 2].
///
/// Spatial: the top 10% keys move `factor` of their volume onto an equal
/// number of randomly selected non-hot keys (integer arithmetic, so the
/// total mass is conserved exactly). factor must lie in (0, 1].
FrequencyVector perturb_stream(std::span<const double> truth, PerturbMode mode, double factor,
                               std::uint64_t seed, const PerturbOptions& options = {},
                               std::optional<std::span<const double>> sigma = std::nullopt);

}  // namespace flore
