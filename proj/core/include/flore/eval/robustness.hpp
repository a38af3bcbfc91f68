#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flore/eval/config.hpp"

namespace flore::eval {

enum class Scenario { kTemporal, kNatural, kSpatial };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

struct RobustnessRow {
  std::string scenario;
  double factor = 0.0;
  std::size_t budget = 0;
  std::size_t keys = 0;      // keys scored
  double are_base = 0.0;     // unperturbed reference
  double are = 0.0;
  double degradation = 0.0;  // percent, (are - are_base) / are_base * 100
  SeedSet seeds;
};

/// temporal / spatial: one model trained on the configured trace; both the
/// reference and the perturbed test streams are fresh replays (same shuffle
/// seed) of the original and the perturbed frequency vectors.
///
/// natural: the trace is cut into four quarters in arrival order; factor w in
/// {0, 1, 2} trains on quarter w, the reference trains on quarters 0-2, and
/// every model is tested on quarter 3, scored on keys present in all four.
std::vector<RobustnessRow> robustness(const ExperimentConfig& config, Scenario scenario,
                                      const std::vector<double>& factors);

std::vector<std::string> robustness_header();
void append_robustness(const std::filesystem::path& path, const std::string& run,
                       const std::vector<RobustnessRow>& rows);
/// Plain-text table, one line per factor.
std::string format_robustness(const std::vector<RobustnessRow>& rows);

}  // namespace flore::eval
