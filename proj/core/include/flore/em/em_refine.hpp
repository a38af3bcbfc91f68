#pragma once

#include <span>
#include <vector>

#include "flore/linsys/sketch_operator.hpp"
#include "flore/stream/types.hpp"

namespace flore {

struct EmConfig {
  std::size_t steps = 5;
  bool accept_if_improves = true;
  double epsilon = 1e-12;

  void validate() const;
};

/// One multiplicative EM update for b = s * Φ f with non-negative Φ:
///   f'_i = f_i / (s * colsum_i) * sum_j s * Φ_ij b_j / (s * (Φf)_j + eps)
/// `phi_scale` = s lets the same routine run in the normalized domain.
/// Throws NumericError on a zero denominator when eps == 0, ParameterError
/// for a signed operator, negative or all-zero f.
std::vector<double> em_step(const SketchOperator& op, std::span<const double> b, std::span<const double> f,
                            double epsilon = 1e-12, double phi_scale = 1.0);

/// ||Φ f - b||_1 (with Φ scaled by phi_scale).
double l1_residual(const SketchOperator& op, std::span<const double> b, std::span<const double> f,
                   double phi_scale = 1.0);

struct EmResult {
  std::vector<double> f;
  std::vector<double> residuals;  // initial residual, then one per accepted step
  std::size_t accepted = 0;
};

/// Runs up to `config.steps` updates. With acceptance on, a step is kept only
/// if it lowers the L1 residual; a rejected step ends the run since the next
/// proposal would be identical.
EmResult em_refine(const SketchOperator& op, std::span<const double> b, std::span<const double> f0,
                   const EmConfig& config, double phi_scale = 1.0);

/// Count-Min point queries on b, clamped below at 1 (no tracked key starts
/// zero-locked).
std::vector<double> em_initial(const SketchOperator& op, std::span<const double> b);

struct NormalizedProblem {
  std::vector<double> b;   // b / sum(b)
  std::vector<double> f0;  // k * f0 / sum(b), sums to 1 when Φ f0 = b
  double mass = 0.0;       // sum(b)
  double bands = 1.0;      // k
  /// Scale applied to Φ in this domain (1/k: columns sum to one).
  double phi_scale() const noexcept { return 1.0 / bands; }
};

/// Throws ParameterError (degenerate problem) when sum(b) == 0.
NormalizedProblem normalize_problem(const SketchOperator& op, std::span<const double> b, std::span<const double> f0);
std::vector<double> denormalize(std::span<const double> g, const NormalizedProblem& record);

}  // namespace flore
