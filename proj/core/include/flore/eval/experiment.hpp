#pragma once

#include <filesystem>

#include "flore/eval/config.hpp"
#include "flore/eval/report.hpp"

namespace flore::eval {

/// Runs every estimator at every budget: build the summary, replay the trace
/// once, recover, score. A failing cell is recorded with its error message and
/// the sweep continues. Timings are measured on separate replay passes and
/// never feed into metric values.
RunReport run_experiment(const ExperimentConfig& config);

/// Writes <out>/metrics.csv and <out>/curves.csv (appending) and
/// <out>/<name>-<seed>.json.
void write_report(const ExperimentConfig& config, const RunReport& report);

}  // namespace flore::eval
