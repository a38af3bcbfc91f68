#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flore/em/em_refine.hpp"
#include "flore/gen/losses.hpp"
#include "flore/gen/model.hpp"
#include "flore/sketch/data_plane.hpp"

namespace flore {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch = 8;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  bool shuffle = true;     // reshuffle sample order every epoch
  bool resample_z = true;  // fresh latent draws every epoch; otherwise fixed per sample
  LossOptions loss;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Normalized samples: row i of `b` is counters_i / scale_i, row i of
/// `target` the matching target frequencies / scale_i clamped to [0, 1].
struct TrainingSet {
  ad::Mat b;
  ad::Mat target;
  std::vector<double> scales;

  std::size_t size() const noexcept { return scales.size(); }
};

enum class TargetSource { kEm, kTruth };

/// Builds the training set from counter snapshots. kEm refines the clamped
/// Count-Min estimate of each snapshot with `em` (no ground truth needed);
/// kTruth uses the snapshot's light_truth. Snapshots with an all-zero sketch
/// are skipped.
TrainingSet prepare_training_set(const SketchOperator& op, std::span<const CounterSnapshot> snapshots,
                                 TargetSource source, const EmConfig& em);

struct TrainHistory {
  std::vector<LossTerms> epochs;  // per-epoch mean of batch losses
  std::size_t steps = 0;
  bool diverged = false;
};

/// Adam on the five-term objective. Only parameters whose group is listed in
/// `groups` move (all when empty). A non-finite loss restores the parameters
/// from the start of the epoch and stops with diverged = true.
TrainHistory train(FloreModel& model, const SketchOperator& op, const TrainingSet& data, const TrainConfig& config,
                   std::span<const ad::ParamGroup> groups = {});

/// Fine-tunes a conditional model for `segment` (appending it when it equals
/// the current segment count) by training only the condition network and the
/// coupling stack on `data`. Throws CapabilityError for unconditional models.
TrainHistory finetune_segment(FloreModel& model, std::size_t segment, const SketchOperator& op,
                              const TrainingSet& data, const TrainConfig& config);

/// Standard-normal latent draws, rows x d_z.
ad::Mat sample_latent(std::size_t rows, std::size_t dz, std::uint64_t seed);

}  // namespace flore
