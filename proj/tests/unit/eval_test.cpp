#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "flore/error.hpp"
#include "flore/eval/ablation.hpp"
#include "flore/eval/config.hpp"
#include "flore/eval/experiment.hpp"
#include "flore/eval/report.hpp"
#include "flore/eval/rip_bench.hpp"
#include "flore/eval/robustness.hpp"

using namespace flore;
using namespace flore::eval;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
name: unit
seed: 5
trace:
  synthetic:
    distribution: zipf
    keys: 256
    items: 20000
    alpha: 1.3
plane:
  budgets: [2KB]
baselines:
  memory: plane-cm
estimators: [cm, cu, cm+em, flore]
flore:
  snapshot_interval: 1000
  window: 32
  model: {latent: 12, hidden: 16, blocks: 2}
  train: {epochs: 4, batch: 8}
timing:
  passes: 1
rip: {m: 32, n: 128, s: 4, trials: 100}
)";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("flore-unit-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const ReportRow& row_of(const RunReport& r, const std::string& estimator) {
  for (const auto& row : r.rows)
    if (row.estimator == estimator) return row;
  throw std::runtime_error("no row for " + estimator);
}

void expect_same_metrics(const MetricsReport& a, const MetricsReport& b) {
  EXPECT_EQ(a.aae, b.aae);
  EXPECT_EQ(a.are, b.are);
  EXPECT_EQ(a.wmre, b.wmre);
  EXPECT_EQ(a.entropy_ae, b.entropy_ae);
  EXPECT_EQ(a.f1, b.f1);
}

}  // namespace

TEST(Config, ParsesBytes) {
  EXPECT_EQ(parse_bytes("64KB"), 65536u);
  EXPECT_EQ(parse_bytes("2M"), 2u * 1024 * 1024);
  EXPECT_EQ(parse_bytes("512B"), 512u);
  EXPECT_EQ(parse_bytes("100"), 100u);
  EXPECT_THROW(parse_bytes("12 parsecs"), ConfigError);
}

TEST(Config, UnknownKeyNamesPath) {
  try {
    parse_config("name: x\nplane:\n  budgets: [2KB]\n  colour: blue\nestimators: [cm]\n"
                 "trace: {synthetic: {keys: 10, items: 100}}\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("plane.colour"), std::string::npos) << e.what();
  }
}

TEST(Config, RejectsInvalidSettings) {
  const std::string base = "name: x\ntrace: {synthetic: {keys: 10, items: 100}}\n";
  EXPECT_THROW(parse_config(base + "plane: {budgets: [2KB]}\nestimators: []\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "plane: {budgets: []}\nestimators: [cm]\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "plane: {budgets: [2KB]}\nestimators: [magic]\n"), ConfigError);
  EXPECT_THROW(parse_config(base + "plane: {budgets: [0]}\nestimators: [cm]\n"), ConfigError);
  EXPECT_THROW(parse_config("name: [unterminated\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/flore.yaml"), ConfigError);
  EXPECT_NO_THROW(load_config(fs::path(FLORE_SOURCE_DIR) / "configs" / "toy.yaml"));
}

TEST(Config, OmittedSectionsKeepDefaults) {
  const auto c = parse_config("name: x\ntrace: {synthetic: {keys: 10, items: 100}}\nplane: {budgets: [2KB]}\n"
                              "estimators: [cm]\n");
  const ExperimentConfig defaults;
  EXPECT_EQ(c.flore.model.latent, defaults.flore.model.latent);
  EXPECT_EQ(c.flore.train.epochs, defaults.flore.train.epochs);
  EXPECT_EQ(c.solvers.dense_limit, defaults.solvers.dense_limit);
}

TEST(Config, SeedOverrideRederivesChildren) {
  auto c = parse_config(kSmall);
  const auto before = c.seeds;
  c.set_seed(99);
  EXPECT_EQ(c.seeds.master, 99u);
  EXPECT_NE(c.seeds.trace, before.trace);
  EXPECT_EQ(c.seeds.trace, SeedSet::derive(99).trace);
}

TEST(Experiment, SingleEstimatorSingleRow) {
  auto c = parse_config(kSmall);
  c.estimators = {Estimator::kCm};
  const auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_TRUE(r.rows[0].ok);
  EXPECT_EQ(r.rows[0].estimator, "cm");
  EXPECT_EQ(r.rows[0].seeds.master, 5u);
}

TEST(Experiment, RerunReproducesMetrics) {
  const auto c = parse_config(kSmall);
  const auto a = run_experiment(c), b = run_experiment(c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_TRUE(a.rows[i].ok) << a.rows[i].error;
    expect_same_metrics(a.rows[i].metrics, b.rows[i].metrics);
    EXPECT_EQ(a.rows[i].consistency, b.rows[i].consistency);
  }
  ASSERT_EQ(a.curves.size(), b.curves.size());
  for (std::size_t i = 0; i < a.curves.size(); ++i) EXPECT_EQ(a.curves[i].loss.total, b.curves[i].loss.total);
}

TEST(Experiment, CountMinErrorShrinksWithBudget) {
  auto c = parse_config(kSmall);
  c.trace.synthetic.keys = 1024;
  c.trace.synthetic.total_items = 100000;
  c.baselines.memory = BaselineMemory::kTotal;
  c.estimators = {Estimator::kCm};
  c.plane.budgets = {16 * 1024, 64 * 1024, 256 * 1024};
  const auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_GE(r.rows[0].metrics.aae, r.rows[1].metrics.aae);
  EXPECT_GE(r.rows[1].metrics.aae, r.rows[2].metrics.aae);
}

TEST(Experiment, FailingCellIsIsolated) {
  auto c = parse_config(kSmall);
  c.estimators = {Estimator::kOmp, Estimator::kCm};
  c.solvers.dense_limit = 1;
  const auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_FALSE(row_of(r, "omp").ok);
  EXPECT_FALSE(row_of(r, "omp").error.empty());
  EXPECT_TRUE(row_of(r, "cm").ok);
  EXPECT_EQ(r.failures(), 1u);
}

TEST(Report, FilesAreAppendSafe) {
  auto c = parse_config(kSmall);
  c.estimators = {Estimator::kCm, Estimator::kCu};
  c.output_dir = scratch("report");
  const auto r = run_experiment(c);
  write_report(c, r);
  write_report(c, r);
  const auto csv = slurp(c.output_dir / "metrics.csv");
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 1u + 2 * r.rows.size());
  EXPECT_EQ(csv.rfind("schema,", 0), 0u);
  const auto manifest = slurp(c.output_dir / "unit-5.json");
  EXPECT_NE(manifest.find("\"schema\""), std::string::npos);
  EXPECT_NE(manifest.find("\"seeds\""), std::string::npos);

  std::ofstream(c.output_dir / "other.csv") << "a,b\n1,2\n";
  EXPECT_THROW(CsvWriter(c.output_dir / "other.csv", metrics_header()), FormatError);
  CsvWriter w(c.output_dir / "fresh.csv", {"x", "y"});
  EXPECT_THROW(w.row({"1"}), ShapeError);
}

TEST(Report, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 12345.678901234567, 0.0, -2.5e-300}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(RipBench, RerunGivesIdenticalCsv) {
  const auto c = parse_config(kSmall);
  const auto dir = scratch("rip");
  append_rip(dir / "a.csv", rip_bench(c.rip, c.seeds.rip));
  append_rip(dir / "b.csv", rip_bench(c.rip, c.seeds.rip));
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  const auto rows = rip_bench(c.rip, c.seeds.rip);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) EXPECT_GT(r.distance, 0.0);
}

TEST(Ablation, FullEqualsStandardPipeline) {
  auto c = parse_config(kSmall);
  c.estimators = {Estimator::kFlore};
  const auto standard = run_experiment(c);
  const auto abl = ablate(c, {"full"});
  ASSERT_EQ(abl.report.rows.size(), 1u);
  ASSERT_TRUE(abl.report.rows[0].ok) << abl.report.rows[0].error;
  expect_same_metrics(abl.report.rows[0].metrics, row_of(standard, "flore").metrics);
}

TEST(Ablation, NoRecEchoShowsTheDrop) {
  const auto c = parse_config(kSmall);
  const auto v = ablation_config(c, "no-rec");
  EXPECT_FALSE(v.flore.train.loss.terms.rec);
  EXPECT_EQ(v.flore.train.loss.weights.rec, 0.0);
  const auto echo = config_json(v);
  EXPECT_NE(echo.find("\"rec\": false"), std::string::npos) << echo;
  EXPECT_NE(echo.find("\"rec\": 0.0"), std::string::npos) << echo;
  const auto naive = ablation_config(c, "naive").flore.train.loss.terms;
  EXPECT_TRUE(naive.con);
  EXPECT_FALSE(naive.rec || naive.inv || naive.ort);
  EXPECT_FALSE(ablation_config(c, "no-con").flore.train.loss.terms.con);
  EXPECT_THROW(ablation_config(c, "no-everything"), ConfigError);
}

TEST(Robustness, TemporalZeroIsExact) {
  const auto c = parse_config(kSmall);
  const auto rows = robustness(c, Scenario::kTemporal, {0.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].degradation, 0.0);
  EXPECT_EQ(rows[0].are, rows[0].are_base);
}

TEST(Robustness, SchemaSharedAcrossScenarios) {
  const auto c = parse_config(kSmall);
  const auto path = scratch("robust") / "robustness.csv";
  append_robustness(path, c.name, robustness(c, Scenario::kTemporal, {1.0}));
  append_robustness(path, c.name, robustness(c, Scenario::kSpatial, {0.5}));
  append_robustness(path, c.name, robustness(c, Scenario::kNatural, {0.0}));
  const auto text = slurp(path);
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  EXPECT_EQ(lines, 4u);
  EXPECT_THROW(robustness(c, Scenario::kNatural, {3.0}), ConfigError);
}

TEST(Robustness, SpatialShiftOnToyWithinTenPercent) {
  const auto c = load_config(fs::path(FLORE_SOURCE_DIR) / "configs" / "toy.yaml");
  const auto rows = robustness(c, Scenario::kSpatial, {0.9});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LE(std::abs(rows[0].degradation), 10.0) << "ARE " << rows[0].are_base << " -> " << rows[0].are;
}
