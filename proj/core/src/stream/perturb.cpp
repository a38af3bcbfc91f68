#include "flore/stream/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flore/error.hpp"
#include "flore/random.hpp"
#include "flore/stream/metrics.hpp"

namespace flore {

PerturbMode parse_perturb_mode(std::string_view name) {
  if (name == "temporal") return PerturbMode::kTemporal;
  if (name == "spatial") return PerturbMode::kSpatial;
  throw ParameterError("unknown perturbation mode '" + std::string(name) + "'");
}

namespace {

std::vector<std::size_t> sample_keys(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  // partial Fisher-Yates
  for (std::size_t i = 0; i < count && i < n; ++i) std::swap(ids[i], ids[i + rng.below(n - i)]);
  ids.resize(std::min(count, n));
  return ids;
}

}  // namespace

FrequencyVector perturb_stream(std::span<const double> truth, PerturbMode mode, double factor,
                               std::uint64_t seed, const PerturbOptions& options,
                               std::optional<std::span<const double>> sigma) {
  FrequencyVector out(truth.begin(), truth.end());
  const std::size_t n = truth.size();
  Rng rng(seed);

  if (mode == PerturbMode::kTemporal) {
    if (!(factor >= 0.0 && factor <= 2.0)) throw ParameterError("temporal fluctuation factor must be in [0, 2]");
    if (sigma && sigma->size() != n) throw ShapeError("sigma length differs from truth length");
    if (factor == 0.0 || n == 0) return out;
    const double fraction = rng.uniform(options.min_fraction, options.max_fraction);
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    for (std::size_t i : sample_keys(n, count, rng)) {
      const double s = sigma ? (*sigma)[i] : std::sqrt(std::max(truth[i], 0.0));
      out[i] = std::max(0.0, std::round(truth[i] + factor * s * rng.normal()));
    }
    return out;
  }

  if (!(factor > 0.0 && factor <= 1.0)) throw ParameterError("spatial proportion factor must be in (0, 1]");
  if (n < 2) return out;
  const auto hot_count =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.hot_fraction * static_cast<double>(n))));
  const auto hot = top_k(truth, std::min(hot_count, n / 2));
  std::vector<char> is_hot(n, 0);
  for (auto i : hot) is_hot[i] = 1;
  std::vector<std::size_t> cold;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_hot[i]) cold.push_back(i);
  // Draw the receivers from the cold keys.
  std::vector<std::size_t> pick = sample_keys(cold.size(), hot.size(), rng);
  for (std::size_t r = 0; r < hot.size(); ++r) {
    const std::size_t from = hot[r];
    const std::size_t to = cold[pick[r]];
    const double moved = std::floor(factor * truth[from]);
    out[from] -= moved;
    out[to] += moved;
  }
  return out;
}

}  // namespace flore
