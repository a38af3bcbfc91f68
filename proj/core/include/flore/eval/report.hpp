#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "flore/eval/config.hpp"
#include "flore/gen/losses.hpp"
#include "flore/stream/metrics.hpp"

namespace flore::eval {

inline constexpr int kReportSchemaVersion = 1;

/// One (estimator, budget) cell.
struct ReportRow {
  std::string run;
  std::string estimator;
  std::size_t budget = 0;
  bool ok = true;
  std::string error;
  MetricsReport metrics;
  double consistency = 0.0;  // FLORE rows only
  double summary_ns_per_item = 0.0;
  double recovery_ms = 0.0;
  double train_ms = 0.0;
  SeedSet seeds;
};

struct CurvePoint {
  std::string run;
  std::string estimator;
  std::size_t budget = 0;
  std::size_t epoch = 0;
  LossTerms loss;
};

struct RunReport {
  std::vector<ReportRow> rows;
  std::vector<CurvePoint> curves;

  std::size_t failures() const;
};

/// Append-safe CSV: a new file gets the header; an existing file is appended
/// to only when its header matches exactly, otherwise FormatError.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

/// Round-trip exact decimal representation.
std::string format_double(double v);

std::vector<std::string> metrics_header();
std::vector<std::string> metrics_cells(const ReportRow& row);
std::vector<std::string> curve_header();
std::vector<std::string> curve_cells(const CurvePoint& p);

void append_metrics(const std::filesystem::path& path, const std::vector<ReportRow>& rows);
void append_curves(const std::filesystem::path& path, const std::vector<CurvePoint>& curves);

/// JSON manifest: schema version, config echo, seed set and every row.
std::string manifest_json(const ExperimentConfig& config, const RunReport& report);
void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config, const RunReport& report);

/// The configuration as a JSON document.
std::string config_json(const ExperimentConfig& config);

}  // namespace flore::eval
