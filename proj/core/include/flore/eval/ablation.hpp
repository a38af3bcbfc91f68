#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flore/eval/config.hpp"
#include "flore/eval/report.hpp"

namespace flore::eval {

/// Loss terms kept by an ablation variant:
///   full    all five terms
///   naive   consistency and sparsity only (every generative term dropped)
///   no-sp / no-ort / no-rec / no-con   the named term dropped
/// A dropped term also has its weight set to zero in the echoed config.
LossOptions ablation_loss(const LossOptions& base, const std::string& variant);
ExperimentConfig ablation_config(const ExperimentConfig& base, const std::string& variant);

struct CdfPoint {
  std::string variant;
  std::string kind;  // "abs" or "rel"
  double quantile = 0.0;
  double value = 0.0;
};

struct AblationResult {
  RunReport report;  // one row per variant, estimator "flore/<variant>"
  std::vector<CdfPoint> cdf;
  std::vector<ExperimentConfig> configs;
};

/// Trains one FLORE model per variant on the same plane with identical seeds
/// (paired runs) and scores the recoveries. Per-variant failures are recorded.
AblationResult ablate(const ExperimentConfig& config, const std::vector<std::string>& variants);

void append_cdf(const std::filesystem::path& path, const std::string& run, const std::vector<CdfPoint>& cdf);

}  // namespace flore::eval
