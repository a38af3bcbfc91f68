#include "flore/stream/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flore/error.hpp"

namespace flore {

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::kZipf: return "zipf";
    case Distribution::kZipfIcml: return "zipf-icml";
    case Distribution::kPareto: return "pareto";
    case Distribution::kExponential: return "exponential";
    case Distribution::kLogNormal: return "lognormal";
  }
  return "unknown";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "zipf") return Distribution::kZipf;
  if (name == "zipf-icml") return Distribution::kZipfIcml;
  if (name == "pareto") return Distribution::kPareto;
  if (name == "exponential") return Distribution::kExponential;
  if (name == "lognormal" || name == "log-normal") return Distribution::kLogNormal;
  throw ParameterError("unknown distribution '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
  if (keys == 0) throw ParameterError("key count must be positive");
  if (key_length == 0 || key_length > 16) throw ParameterError("key length must be in [1, 16]");
  if (key_length < 8 && keys > (std::uint64_t{1} << (8 * key_length)))
    throw ParameterError("key length too small for the key count");
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive");
  };
  switch (kind) {
    case Distribution::kZipf:
    case Distribution::kZipfIcml: positive(alpha, "alpha"); break;
    case Distribution::kPareto:
      positive(alpha, "alpha");
      positive(x_min, "x_m");
      break;
    case Distribution::kExponential: positive(lambda, "lambda"); break;
    case Distribution::kLogNormal:
      positive(sigma, "sigma");
      if (!std::isfinite(mu)) throw ParameterError("mu must be finite");
      break;
  }
}

std::vector<double> draw_weights(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t n = spec.keys;
  std::vector<double> w(n);
  switch (spec.kind) {
    case Distribution::kZipf:
      for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), spec.alpha);
      break;
    case Distribution::kZipfIcml:
      for (std::size_t i = 0; i < n; ++i)
        w[i] = std::floor(static_cast<double>(n) / std::pow(static_cast<double>(i + 1), spec.alpha));
      break;
    case Distribution::kPareto:
      for (auto& x : w) x = spec.x_min * std::pow(rng.uniform_open0(), -1.0 / spec.alpha);
      break;
    case Distribution::kExponential:
      for (auto& x : w) x = -std::log(rng.uniform_open0()) / spec.lambda;
      break;
    case Distribution::kLogNormal:
      for (auto& x : w) x = std::exp(spec.mu + spec.sigma * rng.normal());
      break;
  }
  return w;
}

namespace {

// Expected per-key weight where finite; the sampled distributions are scaled
// so that the expected total matches spec.total_items.
double scale_for(const SyntheticSpec& spec, const std::vector<double>& w) {
  const double n = static_cast<double>(w.size());
  const double total = static_cast<double>(spec.total_items);
  const double empirical = std::accumulate(w.begin(), w.end(), 0.0);
  switch (spec.kind) {
    case Distribution::kZipf: return total / empirical;
    case Distribution::kZipfIcml: return std::max(1.0, std::floor(total / empirical));
    case Distribution::kPareto:
      if (spec.alpha > 1.0) return total / (n * spec.alpha * spec.x_min / (spec.alpha - 1.0));
      return total / empirical;
    case Distribution::kExponential: return total / (n / spec.lambda);
    case Distribution::kLogNormal:
      return total / (n * std::exp(spec.mu + 0.5 * spec.sigma * spec.sigma));
  }
  return 1.0;
}

}  // namespace

GeneratedStream generate_stream(const SyntheticSpec& spec) {
  spec.validate();
  Rng sampler(derive_seed(spec.rng_seed, 0));
  std::vector<double> w = draw_weights(spec, sampler);
  const double scale = scale_for(spec, w);

  std::vector<double> ranked(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) ranked[i] = std::max(1.0, std::floor(scale * w[i]));

  std::vector<std::size_t> owner(w.size());
  std::iota(owner.begin(), owner.end(), std::size_t{0});
  if (spec.permute) {
    Rng perm(derive_seed(spec.permutation_seed, 0));
    perm.shuffle(std::span<std::size_t>(owner));
  }

  GeneratedStream out;
  out.scale = scale;
  out.truth.assign(w.size(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) out.truth[owner[r]] = ranked[r];
  out.trace = materialize_stream(out.truth, spec.key_length, derive_seed(spec.rng_seed, 1),
                                 std::string(to_string(spec.kind)));
  std::vector<Key> keys;
  keys.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) keys.push_back(encode_id(i, spec.key_length));
  out.index = KeyIndex(std::move(keys));
  return out;
}

StreamTrace materialize_stream(const FrequencyVector& frequencies, std::size_t key_length,
                               std::uint64_t seed, std::string name) {
  StreamTrace trace;
  trace.name = std::move(name);
  trace.key_length = key_length;
  std::uint64_t total = 0;
  for (double f : frequencies) {
    if (f < 0.0 || f != std::floor(f)) throw ParameterError("frequencies must be non-negative integers");
    total += static_cast<std::uint64_t>(f);
  }
  std::vector<std::uint32_t> ids;
  ids.reserve(total);
  for (std::size_t i = 0; i < frequencies.size(); ++i)
    ids.insert(ids.end(), static_cast<std::size_t>(frequencies[i]), static_cast<std::uint32_t>(i));
  Rng rng(seed);
  rng.shuffle(std::span<std::uint32_t>(ids));

  std::vector<Key> keys;
  keys.reserve(frequencies.size());
  for (std::size_t i = 0; i < frequencies.size(); ++i) keys.push_back(encode_id(i, key_length));
  trace.items.reserve(ids.size());
  for (auto id : ids) trace.items.push_back({keys[id], 1});
  return trace;
}

double skewness(const FrequencyVector& f) {
  if (f.size() < 2) return 0.0;
  const double n = static_cast<double>(f.size());
  const double mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0;
  for (double x : f) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 == 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

}  // namespace flore
