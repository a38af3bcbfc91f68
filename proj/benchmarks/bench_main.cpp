#include <benchmark/benchmark.h>

#include "flore/em/em_refine.hpp"
#include "flore/gen/model.hpp"
#include "flore/gen/recovery.hpp"
#include "flore/linsys/sketch_operator.hpp"
#include "flore/random.hpp"
#include "flore/sketch/count_min.hpp"
#include "flore/sketch/data_plane.hpp"
#include "flore/sketch/hash.hpp"
#include "flore/stream/generator.hpp"

using namespace flore;

namespace {

GeneratedStream stream(std::size_t keys, std::uint64_t items) {
  SyntheticSpec s;
  s.keys = keys;
  s.total_items = items;
  s.alpha = 1.2;
  return generate_stream(s);
}

void BM_CountMinUpdate(benchmark::State& state) {
  const auto g = stream(10000, 200000);
  CountMin cm(static_cast<std::size_t>(state.range(0)), 1024, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& it = g.trace.items[i++ % g.trace.items.size()];
    cm.update(key_hash(it.key), it.value);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CountMinUpdate)->Arg(2)->Arg(4)->Arg(8);

void BM_ConservativeUpdate(benchmark::State& state) {
  const auto g = stream(10000, 200000);
  CountMin cm(4, 1024, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& it = g.trace.items[i++ % g.trace.items.size()];
    cm.update_conservative(key_hash(it.key), it.value);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ConservativeUpdate);

void BM_DataPlaneInsert(benchmark::State& state) {
  const auto g = stream(10000, 200000);
  DataPlaneConfig c;
  c.cm_width = 1024;
  c.filter_arrays = 256;
  c.bloom_bits = 96000;
  FloreDataPlane plane(c);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& it = g.trace.items[i++ % g.trace.items.size()];
    benchmark::DoNotOptimize(plane.insert(it.key, it.value));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DataPlaneInsert);

void BM_OperatorApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = key_hash(encode_id(i));
  const SketchOperator op(HashFamily(4, 256, 3), keys);
  std::vector<double> f(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(f));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_OperatorApply)->RangeMultiplier(4)->Range(1024, 65536)->Complexity(benchmark::oN);

void BM_EmStep(benchmark::State& state) {
  const auto g = stream(static_cast<std::size_t>(state.range(0)), 100000);
  CountMin cm(4, 256, 1);
  for (const auto& it : g.trace.items) cm.update(key_hash(it.key), it.value);
  const auto op = build_operator(cm.hash(), g.index);
  const auto b = cm.flatten();
  const auto f = em_initial(op, b);
  for (auto _ : state) benchmark::DoNotOptimize(em_step(op, b, f));
}
BENCHMARK(BM_EmStep)->Arg(1000)->Arg(10000);

void BM_Inference(benchmark::State& state) {
  ModelConfig c;
  c.keys = 1000;
  c.counters = 256;
  c.latent = 24;
  c.hidden = 64;
  c.blocks = 3;
  const FloreModel model(c);
  Rng rng(1);
  ad::Mat b(1, 256), z(1, c.d_z());
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform();
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(model.generate(b, z));
}
BENCHMARK(BM_Inference);

}  // namespace

BENCHMARK_MAIN();
