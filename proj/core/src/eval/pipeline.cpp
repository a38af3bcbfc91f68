#include "flore/eval/pipeline.hpp"

#include <cmath>
#include <unordered_map>

#include "flore/error.hpp"
#include "flore/sketch/hash.hpp"
#include "flore/sketch/memory_budget.hpp"
#include "flore/stream/generator.hpp"
#include "flore/stream/trace_io.hpp"

namespace flore::eval {

Workload load_workload(const ExperimentConfig& config) {
  Workload w;
  if (config.trace.from_file) {
    w.trace = load_trace(config.trace.path, config.trace.key_length);
    w.universe = KeyIndex::from_trace(w.trace);
    w.truth = true_frequencies(w.trace, w.universe);
  } else {
    auto g = generate_stream(config.trace.synthetic);
    w.trace = std::move(g.trace);
    w.universe = std::move(g.index);
    w.truth = std::move(g.truth);
  }
  return w;
}

Workload slice_workload(const StreamTrace& source, std::size_t begin, std::size_t end) {
  if (begin > end || end > source.size()) throw ParameterError("trace slice out of range");
  Workload w;
  w.trace.name = source.name;
  w.trace.key_length = source.key_length;
  w.trace.items.assign(source.items.begin() + static_cast<std::ptrdiff_t>(begin),
                       source.items.begin() + static_cast<std::ptrdiff_t>(end));
  w.universe = KeyIndex::from_trace(w.trace);
  w.truth = true_frequencies(w.trace, w.universe);
  return w;
}

DataPlaneConfig plane_config(const ExperimentConfig& config, std::size_t budget, std::size_t distinct_keys) {
  const std::size_t expected = config.plane.expected_keys ? config.plane.expected_keys : distinct_keys;
  auto split = allocate_memory(budget, expected);
  // from_budget sizes the filter with the default entry count; redo it for the configured one
  auto pc = DataPlaneConfig::from_budget(split, config.plane.cm_rows, config.seeds.plane);
  pc.filter_entries = config.plane.filter_entries;
  pc.filter_arrays = split.filter / AugmentedFilter::array_bytes(pc.filter_entries);
  pc.threshold = config.plane.threshold;
  pc.bloom_hashes = config.plane.bloom_hashes;
  pc.validate();
  return pc;
}

PlaneRun summarize(const Workload& workload, const DataPlaneConfig& config, std::size_t interval,
                   std::size_t window) {
  PlaneRun run{FloreDataPlane(config), {}};
  std::unordered_map<std::uint64_t, std::uint32_t> slot;
  slot.reserve(workload.universe.size());
  for (std::uint32_t i = 0; i < workload.universe.size(); ++i) slot.emplace(key_hash(workload.universe.key(i)), i);

  std::vector<double> light(workload.universe.size(), 0.0);
  SnapshotWindow buffer(interval, window);
  std::uint64_t pos = 0;
  for (const auto& item : workload.trace.items) {
    const auto r = run.plane.insert(item.key, item.value);
    if (r.cm_touched) light[slot.at(r.cm_hash)] += r.cm_value;
    ++pos;
    if (buffer.due(pos)) buffer.push({pos, run.plane.cm().flatten(), light});
  }

  const auto& keys = run.plane.recorded_keys();
  std::vector<std::uint32_t> order(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) order[i] = workload.universe.at(keys[i]);
  for (const auto& s : buffer.snapshots()) {
    CounterSnapshot aligned{s.position, s.counters, FrequencyVector(keys.size())};
    for (std::size_t i = 0; i < keys.size(); ++i) aligned.light_truth[i] = s.light_truth[order[i]];
    run.snapshots.push_back(std::move(aligned));
  }
  return run;
}

FloreFit fit_flore(const PlaneRun& run, const FloreSettings& settings, TargetSource source, const EmConfig& em) {
  const auto op = plane_operator(run.plane);
  auto data = prepare_training_set(op, run.snapshots, source, em);
  if (data.size() == 0) throw EmptySketchError("no snapshot carries light-part mass to train on");
  ModelConfig mc = settings.model;
  mc.keys = op.cols();
  mc.counters = op.rows();
  FloreFit fit{FloreModel(mc), {}, data.size()};
  fit.history = train(fit.model, op, data, settings.train);
  return fit;
}

double consistency(const FloreDataPlane& plane, const RecoveryResult& result) {
  if (result.empty_sketch) return 0.0;
  const auto op = plane_operator(plane, result.keys);
  const auto image = op.apply(result.sketch_part);
  const auto b = plane.cm().flatten();
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    num += std::abs(image[j] - b[j]);
    den += b[j];
  }
  return den > 0 ? num / den : 0.0;
}

std::vector<double> select(std::span<const double> values, std::span<const std::size_t> keep) {
  std::vector<double> out;
  out.reserve(keep.size());
  for (auto i : keep) out.push_back(values[i]);
  return out;
}

}  // namespace flore::eval
