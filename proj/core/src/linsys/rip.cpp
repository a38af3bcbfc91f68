#include "flore/linsys/rip.hpp"

#include <cmath>
#include <numeric>

#include "flore/error.hpp"
#include "flore/random.hpp"

namespace flore {

namespace {

template <typename NormOf>
std::vector<double> sampled_trace(std::size_t n, std::size_t s, std::size_t trials, std::uint64_t seed,
                                  NormOf&& norm_of) {
  if (s == 0 || s > n) throw ParameterError("sparsity must be in [1, N]");
  if (trials == 0) throw ParameterError("at least one trial is required");
  Rng rng(seed);
  std::vector<std::size_t> pool(n);
  std::vector<std::size_t> support(s);
  std::vector<double> values(s);
  std::vector<double> trace;
  trace.reserve(trials);
  double best = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t pick = j + rng.below(n - j);
      std::swap(pool[j], pool[pick]);
      support[j] = pool[j];
    }
    double sq = 0.0;
    for (auto& v : values) {
      v = rng.normal();
      sq += v * v;
    }
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& v : values) v *= inv;
    best = std::max(best, std::abs(norm_of(support, values) - 1.0));
    trace.push_back(best);
  }
  return trace;
}

}  // namespace

std::vector<double> rip_trace(const Eigen::MatrixXd& a, std::size_t s, std::size_t trials, std::uint64_t seed) {
  Eigen::VectorXd y(a.rows());
  return sampled_trace(static_cast<std::size_t>(a.cols()), s, trials, seed,
                       [&](const std::vector<std::size_t>& support, const std::vector<double>& values) {
                         y.setZero();
                         for (std::size_t j = 0; j < support.size(); ++j)
                           y += values[j] * a.col(static_cast<Eigen::Index>(support[j]));
                         return y.norm();
                       });
}

std::vector<double> rip_trace(const SketchOperator& op, std::size_t s, std::size_t trials, std::uint64_t seed) {
  std::vector<double> y(op.rows());
  return sampled_trace(op.cols(), s, trials, seed,
                       [&](const std::vector<std::size_t>& support, const std::vector<double>& values) {
                         std::fill(y.begin(), y.end(), 0.0);
                         for (std::size_t j = 0; j < support.size(); ++j)
                           for (std::size_t r = 0; r < op.bands(); ++r)
                             y[op.row_of(support[j], r)] += op.value_of(support[j], r) * values[j];
                         double sq = 0.0;
                         for (double v : y) sq += v * v;
                         return std::sqrt(sq);
                       });
}

double rip_distance(const Eigen::MatrixXd& a, std::size_t s, std::size_t trials, std::uint64_t seed) {
  return rip_trace(a, s, trials, seed).back();
}

double rip_distance(const SketchOperator& op, std::size_t s, std::size_t trials, std::uint64_t seed) {
  return rip_trace(op, s, trials, seed).back();
}

}  // namespace flore
