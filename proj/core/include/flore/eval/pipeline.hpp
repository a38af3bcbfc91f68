#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flore/eval/config.hpp"
#include "flore/gen/recovery.hpp"
#include "flore/sketch/data_plane.hpp"
#include "flore/stream/types.hpp"

namespace flore::eval {

/// Trace plus the universe it is scored against.
struct Workload {
  StreamTrace trace;
  KeyIndex universe;
  FrequencyVector truth;
};

/// Synthetic generation or file load, as the config says.
Workload load_workload(const ExperimentConfig& config);
/// Items [begin, end) of `source`, with its own universe and truth.
Workload slice_workload(const StreamTrace& source, std::size_t begin, std::size_t end);

DataPlaneConfig plane_config(const ExperimentConfig& config, std::size_t budget, std::size_t distinct_keys);

/// A data plane after one replay, with the counter snapshots the control
/// plane collected. Snapshot light truths are aligned to the plane's
/// recorded key order.
struct PlaneRun {
  FloreDataPlane plane;
  std::vector<CounterSnapshot> snapshots;
};

PlaneRun summarize(const Workload& workload, const DataPlaneConfig& plane, std::size_t interval, std::size_t window);

struct FloreFit {
  FloreModel model;
  TrainHistory history;
  std::size_t samples = 0;
};

/// Trains a fresh model on the run's snapshots. Throws EmptySketchError when
/// no snapshot carries light mass.
FloreFit fit_flore(const PlaneRun& run, const FloreSettings& settings, TargetSource source, const EmConfig& em);

/// ||Φ f_sketch - b||_1 / ||b||_1 on the plane's Count-Min; 0 for an empty sketch.
double consistency(const FloreDataPlane& plane, const RecoveryResult& result);

/// Returns the entries of `values` at the positions in `keep`.
std::vector<double> select(std::span<const double> values, std::span<const std::size_t> keep);

}  // namespace flore::eval
