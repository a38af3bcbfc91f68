#include "flore/stream/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "flore/error.hpp"

namespace flore {

std::size_t default_heavy_hitter_count(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return std::max<std::size_t>(k, 1);
}

std::vector<std::size_t> top_k(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, values.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (values[a] != values[b]) return values[a] > values[b];
                      return a < b;
                    });
  order.resize(k);
  return order;
}

double entropy(std::span<const double> f) {
  double total = 0.0;
  for (double x : f) total += std::max(x, 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double x : f) {
    if (x <= 0.0) continue;
    const double p = x / total;
    h -= p * std::log(p);
  }
  return h;
}

double wmre(std::span<const double> estimate, std::span<const double> truth) {
  auto histogram = [](std::span<const double> v) {
    std::map<long long, double> h;
    for (double x : v) {
      const long long j = std::llround(std::max(x, 0.0));
      if (j > 0) h[j] += 1.0;
    }
    return h;
  };
  const auto ht = histogram(truth);
  const auto he = histogram(estimate);
  double num = 0.0, den = 0.0;
  auto accumulate = [&](long long j) {
    const auto it = ht.find(j);
    const auto ie = he.find(j);
    const double a = it == ht.end() ? 0.0 : it->second;
    const double b = ie == he.end() ? 0.0 : ie->second;
    num += std::abs(a - b);
    den += 0.5 * (a + b);
  };
  for (const auto& [j, _] : ht) accumulate(j);
  for (const auto& [j, _] : he)
    if (!ht.contains(j)) accumulate(j);
  return den > 0.0 ? num / den : 0.0;
}

MetricsReport compute_metrics(std::span<const double> estimate, std::span<const double> truth,
                              std::size_t hh_count) {
  if (estimate.size() != truth.size())
    throw ShapeError("estimate has " + std::to_string(estimate.size()) + " entries, truth has " +
                     std::to_string(truth.size()));
  const std::size_t n = truth.size();
  if (n == 0) return MetricsReport{.f1 = 1.0, .precision = 1.0, .recall = 1.0};
  if (hh_count == 0 || hh_count > n) throw ParameterError("heavy-hitter count must be in [1, N]");

  MetricsReport r;
  for (std::size_t i = 0; i < n; ++i) {
    const double err = std::abs(truth[i] - estimate[i]);
    r.aae += err;
    r.are += err / std::max(truth[i], 1.0);
  }
  r.aae /= static_cast<double>(n);
  r.are /= static_cast<double>(n);
  r.wmre = wmre(estimate, truth);
  r.entropy_ae = std::abs(entropy(truth) - entropy(estimate));

  auto actual = top_k(truth, hh_count);
  auto predicted = top_k(estimate, hh_count);
  std::sort(actual.begin(), actual.end());
  std::sort(predicted.begin(), predicted.end());
  std::vector<std::size_t> hit;
  std::set_intersection(actual.begin(), actual.end(), predicted.begin(), predicted.end(),
                        std::back_inserter(hit));
  r.precision = static_cast<double>(hit.size()) / static_cast<double>(predicted.size());
  r.recall = static_cast<double>(hit.size()) / static_cast<double>(actual.size());
  r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

}  // namespace flore
