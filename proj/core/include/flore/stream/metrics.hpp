#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flore/stream/types.hpp"

namespace flore {

struct MetricsReport {
  double aae = 0.0;
  double are = 0.0;
  double wmre = 0.0;
  double entropy_ae = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// ceil(log2 N), at least 1.
std::size_t default_heavy_hitter_count(std::size_t n);

/// Indices of the k largest entries, ties broken by ascending index.
std::vector<std::size_t> top_k(std::span<const double> values, std::size_t k);

/// Shannon entropy (natural log) of the normalized non-negative vector;
/// 0 for an all-zero vector.
double entropy(std::span<const double> f);

/// Weighted mean relative error between the frequency-count histograms of
/// the two vectors (values rounded to integers, frequency 0 excluded).
double wmre(std::span<const double> estimate, std::span<const double> truth);

/// AAE, ARE (denominator max(f_i, 1)), WMRE, entropy AE and heavy-hitter
/// precision/recall/F1 over the top `hh_count` keys. Throws ShapeError on a
/// length mismatch and ParameterError if hh_count is 0 or exceeds N.
MetricsReport compute_metrics(std::span<const double> estimate, std::span<const double> truth,
                              std::size_t hh_count);

}  // namespace flore
