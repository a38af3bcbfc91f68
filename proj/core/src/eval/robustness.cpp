#include "flore/eval/robustness.hpp"

#include <cmath>
#include <sstream>

#include "flore/error.hpp"
#include "flore/eval/pipeline.hpp"
#include "flore/eval/report.hpp"
#include "flore/random.hpp"
#include "flore/stream/metrics.hpp"
#include "flore/stream/perturb.hpp"

namespace flore::eval {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kTemporal: return "temporal";
    case Scenario::kNatural: return "natural";
    case Scenario::kSpatial: return "spatial";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "temporal") return Scenario::kTemporal;
  if (name == "natural") return Scenario::kNatural;
  if (name == "spatial") return Scenario::kSpatial;
  throw ConfigError("unknown robustness scenario '" + name + "'");
}

namespace {

StreamTrace replay_counts(const KeyIndex& universe, std::span<const double> counts, std::size_t key_length,
                          std::uint64_t seed) {
  StreamTrace t;
  t.name = "replay";
  t.key_length = key_length;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto c = static_cast<std::int64_t>(std::llround(counts[i]));
    for (std::int64_t j = 0; j < c; ++j) t.items.push_back({universe.key(static_cast<std::uint32_t>(i)), 1});
  }
  Rng rng(seed);
  rng.shuffle(std::span<StreamItem>(t.items));
  return t;
}

double are_of(std::span<const double> est, std::span<const double> truth) {
  return compute_metrics(est, truth, default_heavy_hitter_count(truth.size())).are;
}

double percent_change(double are, double base) {
  if (base == 0.0) return are == 0.0 ? 0.0 : INFINITY;
  return (are - base) / base * 100.0;
}

/// Recovery of `plane` by `model` over `keys`, aligned to `universe`.
FrequencyVector recover_on(const FloreDataPlane& plane, const FloreModel& model, std::span<const Key> keys,
                           const KeyIndex& universe, std::uint64_t seed) {
  return align_to_index(recover(plane, model, seed, keys), universe);
}

std::vector<RobustnessRow> shifted(const ExperimentConfig& config, Scenario scenario,
                                   const std::vector<double>& factors, std::size_t budget) {
  const Workload work = load_workload(config);
  const auto pc = plane_config(config, budget, work.universe.size());
  const auto train_run = summarize(work, pc, config.flore.snapshot_interval, config.flore.window);
  const auto fit = fit_flore(train_run, config.flore, TargetSource::kEm, config.refine);
  const auto& keys = train_run.plane.recorded_keys();
  const std::uint64_t shuffle_seed = derive_seed(config.seeds.perturb, 0);

  auto score = [&](const FrequencyVector& counts) {
    const auto trace = replay_counts(work.universe, counts, work.trace.key_length, shuffle_seed);
    FloreDataPlane plane(pc);
    plane.insert(trace);
    return are_of(recover_on(plane, fit.model, keys, work.universe, config.seeds.recovery), counts);
  };

  const double base = score(work.truth);
  const auto mode = scenario == Scenario::kTemporal ? PerturbMode::kTemporal : PerturbMode::kSpatial;
  std::vector<RobustnessRow> rows;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto counts = perturb_stream(work.truth, mode, factors[i], derive_seed(config.seeds.perturb, 1 + i));
    const double are = score(counts);
    rows.push_back({to_string(scenario), factors[i], budget, work.universe.size(), base, are,
                    percent_change(are, base), config.seeds});
  }
  return rows;
}

std::vector<RobustnessRow> natural(const ExperimentConfig& config, const std::vector<double>& factors,
                                   std::size_t budget) {
  const Workload work = load_workload(config);
  const std::size_t len = work.trace.size();
  if (len < 4) throw ParameterError("natural-shift scenario needs at least four items");
  auto cut = [&](std::size_t q) { return q * len / 4; };
  std::vector<Workload> quarters;
  for (std::size_t q = 0; q < 4; ++q) quarters.push_back(slice_workload(work.trace, cut(q), cut(q + 1)));

  std::vector<std::size_t> selected;
  for (std::uint32_t i = 0; i < work.universe.size(); ++i) {
    const auto& key = work.universe.key(i);
    bool everywhere = true;
    for (const auto& q : quarters) everywhere = everywhere && q.universe.find(key).has_value();
    if (everywhere) selected.push_back(i);
  }
  if (selected.empty()) throw ParameterError("no key appears in all four quarters");

  const auto pc = plane_config(config, budget, work.universe.size());
  const Workload& test = quarters[3];
  FloreDataPlane test_plane(pc);
  test_plane.insert(test.trace);
  FrequencyVector test_truth(work.universe.size(), 0.0);
  for (std::uint32_t i = 0; i < test.universe.size(); ++i) test_truth[work.universe.at(test.universe.key(i))] = test.truth[i];
  const auto truth_sel = select(test_truth, selected);

  auto score = [&](const Workload& train_on) {
    const auto run = summarize(train_on, pc, config.flore.snapshot_interval, config.flore.window);
    const auto fit = fit_flore(run, config.flore, TargetSource::kEm, config.refine);
    const auto est = recover_on(test_plane, fit.model, run.plane.recorded_keys(), work.universe, config.seeds.recovery);
    return are_of(select(est, selected), truth_sel);
  };

  const double base = score(slice_workload(work.trace, 0, cut(3)));
  std::vector<RobustnessRow> rows;
  for (double f : factors) {
    const auto w = static_cast<std::size_t>(f);
    if (static_cast<double>(w) != f || w > 2) throw ConfigError("natural-shift windows are 0, 1 or 2");
    const double are = score(quarters[w]);
    rows.push_back({"natural", f, budget, selected.size(), base, are, percent_change(are, base), config.seeds});
  }
  return rows;
}

}  // namespace

std::vector<RobustnessRow> robustness(const ExperimentConfig& config, Scenario scenario,
                                      const std::vector<double>& factors) {
  config.validate();
  const std::size_t budget = config.robustness.budget ? config.robustness.budget : config.plane.budgets.front();
  if (scenario == Scenario::kNatural) return natural(config, factors, budget);
  return shifted(config, scenario, factors, budget);
}

std::vector<std::string> robustness_header() {
  return {"schema", "run", "scenario", "factor", "budget_bytes", "keys", "are_base", "are", "degradation_pct",
          "seed_master", "seed_perturb"};
}

void append_robustness(const std::filesystem::path& path, const std::string& run,
                       const std::vector<RobustnessRow>& rows) {
  CsvWriter w(path, robustness_header());
  for (const auto& r : rows)
    w.row({std::to_string(kReportSchemaVersion), run, r.scenario, format_double(r.factor), std::to_string(r.budget),
           std::to_string(r.keys), format_double(r.are_base), format_double(r.are), format_double(r.degradation),
           std::to_string(r.seeds.master), std::to_string(r.seeds.perturb)});
}

std::string format_robustness(const std::vector<RobustnessRow>& rows) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "scenario   factor   ARE(ref)   ARE      decline%\n";
  for (const auto& r : rows)
    out << r.scenario << std::string(r.scenario.size() < 11 ? 11 - r.scenario.size() : 1, ' ') << r.factor << "     "
        << r.are_base << "     " << r.are << "     " << r.degradation << '\n';
  return out.str();
}

}  // namespace flore::eval
