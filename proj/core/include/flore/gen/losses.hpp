#pragma once

#include <string>

#include "flore/gen/autodiff.hpp"
#include "flore/gen/model.hpp"
#include "flore/linsys/sketch_operator.hpp"

namespace flore {

struct LossWeights {
  double rec = 0.5;    // alpha_1
  double inv = 0.001;  // alpha_2
  double ort = 0.01;   // alpha_3
  double sp = 0.01;    // alpha_4

  void validate() const;
};

enum class Discrepancy { kMmd, kMoment };

std::string to_string(Discrepancy d);
Discrepancy parse_discrepancy(const std::string& name);

/// Which of the five terms enter the objective. A dropped term is not
/// evaluated at all and reported as 0.
struct LossTermMask {
  bool con = true, rec = true, inv = true, ort = true, sp = true;
};

struct LossOptions {
  LossWeights weights;
  Discrepancy discrepancy = Discrepancy::kMmd;
  LossTermMask terms;
};

struct LossTerms {
  double con = 0, rec = 0, inv = 0, ort = 0, sp = 0, total = 0;
};

/// One batch in the normalized domain: b' = b / scale (B x m), targets
/// f / scale (B x N) and latent samples z (B*S x d_z).
struct LossBatch {
  ad::Mat b;
  ad::Mat target;
  ad::Mat z;
};

/// Builds the objective on the tape:
///   f0 = G([b, z]), f1 = G([Φ f, z]), f2 = G(G^-1(f)), bz = G^-1(f0)
///   L = ms(Φ f0 - b) + a1 ms(f1 - f) + a2 ms(f2 - f) + a3 D([b, z], bz) + a4 mean|f0|
/// `terms` receives the individual values.
ad::Var build_objective(ad::Tape& t, const FloreModel& model, const SketchOperator& op, const LossBatch& batch,
                        const LossOptions& options, LossTerms* terms = nullptr);

/// Values only.
LossTerms compute_losses(const FloreModel& model, const SketchOperator& op, const LossBatch& batch,
                         const LossOptions& options);

/// Values plus gradients, written into the model's parameter grads (zeroed first).
LossTerms loss_gradients(const FloreModel& model, const SketchOperator& op, const LossBatch& batch,
                         const LossOptions& options);

}  // namespace flore
