#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flore/em/em_refine.hpp"
#include "flore/gen/model.hpp"
#include "flore/gen/trainer.hpp"
#include "flore/stream/generator.hpp"

namespace flore::eval {

enum class Estimator { kCm, kCs, kCu, kAg, kCmEm, kOmp, kLsq, kFlore, kFlorePerfect };

std::string to_string(Estimator e);
/// Accepts cm, cs, cu, ag, cm+em, omp, lsq, flore, flore-perfect.
Estimator parse_estimator(const std::string& name);
bool is_flore(Estimator e) noexcept;

/// Every seed used by a run, all derived from the master seed.
struct SeedSet {
  std::uint64_t master = 0;
  std::uint64_t trace = 0;
  std::uint64_t permutation = 0;
  std::uint64_t plane = 0;
  std::uint64_t model = 0;
  std::uint64_t train = 0;
  std::uint64_t recovery = 0;
  std::uint64_t rip = 0;
  std::uint64_t perturb = 0;

  static SeedSet derive(std::uint64_t master);
};

struct TraceSource {
  bool from_file = false;
  std::filesystem::path path;
  std::size_t key_length = 0;  // file traces; 0 infers
  SyntheticSpec synthetic;     // seeds overwritten from SeedSet
};

enum class BaselineMemory {
  kTotal,     // the whole budget goes to the baseline sketch
  kPlaneCm,   // same counter array size as FLORE's Count-Min share
};

struct PlaneSettings {
  std::vector<std::size_t> budgets;  // bytes
  std::size_t expected_keys = 0;     // 0: number of distinct keys in the trace
  std::size_t cm_rows = 4;
  std::size_t filter_entries = 7;
  double threshold = 8.0;
  std::size_t bloom_hashes = 7;
};

struct BaselineSettings {
  BaselineMemory memory = BaselineMemory::kTotal;
  std::size_t ag_slots = 32;
};

struct SolverSettings {
  std::size_t omp_sparsity = 0;  // 0: m / 4
  double omp_tol = 1e-6;
  std::size_t lsq_iters = 200;
  double lsq_tol = 1e-8;
  std::size_t dense_limit = 1u << 24;  // m * N entries allowed for OMP
};

struct FloreSettings {
  std::size_t snapshot_interval = 5000;
  std::size_t window = 256;
  ModelConfig model;  // keys / counters / seed filled per run
  TrainConfig train;  // seed filled per run
};

struct RipSettings {
  std::size_t m = 128;
  std::size_t n = 1024;
  std::size_t s = 16;
  std::size_t trials = 2000;
  std::size_t cm_rows = 4;
  std::vector<std::string> kinds = {"BM", "FM", "GM", "IM", "CM", "CS"};
};

struct AblationSettings {
  std::vector<std::string> variants = {"naive", "no-sp", "no-ort", "no-rec", "no-con", "full"};
  std::size_t budget = 0;  // 0: first plane budget
};

struct RobustnessSettings {
  std::vector<double> temporal = {0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> natural = {0, 1, 2};
  std::vector<double> spatial = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::size_t budget = 0;
};

struct ExperimentConfig {
  std::string name = "run";
  std::filesystem::path output_dir = "out";
  TraceSource trace;
  PlaneSettings plane;
  BaselineSettings baselines;
  std::vector<Estimator> estimators;
  EmConfig refine;
  SolverSettings solvers;
  FloreSettings flore;
  std::size_t heavy_hitters = 0;  // 0: ceil(log2 N)
  std::size_t timing_passes = 5;
  RipSettings rip;
  AblationSettings ablation;
  RobustnessSettings robustness;
  SeedSet seeds;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Re-derives every seed from `master`.
  void set_seed(std::uint64_t master);
};

/// Parses the YAML experiment description. Unknown keys, wrong types and
/// out-of-range values raise ConfigError. Budgets accept plain byte counts or
/// strings with a KB/MB suffix (powers of 1024).
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "64KB" -> 65536. Throws ConfigError.
std::size_t parse_bytes(const std::string& text);

}  // namespace flore::eval
