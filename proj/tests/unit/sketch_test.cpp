#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "flore/error.hpp"
#include "flore/random.hpp"
#include "flore/sketch/augmented_filter.hpp"
#include "flore/sketch/augmented_sketch.hpp"
#include "flore/sketch/bloom_filter.hpp"
#include "flore/sketch/count_min.hpp"
#include "flore/sketch/count_sketch.hpp"
#include "flore/sketch/data_plane.hpp"
#include "flore/sketch/hash.hpp"
#include "flore/sketch/memory_budget.hpp"
#include "flore/sketch/snapshot_io.hpp"
#include "flore/stream/generator.hpp"

using namespace flore;

namespace {

GeneratedStream zipf_stream(std::size_t keys, std::uint64_t items, double alpha, std::uint64_t seed) {
  SyntheticSpec s;
  s.keys = keys;
  s.total_items = items;
  s.alpha = alpha;
  s.rng_seed = seed;
  s.permutation_seed = seed + 1;
  return generate_stream(s);
}

DataPlaneConfig small_plane(std::uint64_t seed) {
  DataPlaneConfig c;
  c.cm_rows = 4;
  c.cm_width = 64;
  c.filter_arrays = 16;
  c.bloom_bits = 8192;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(CountMinTest, FixtureHashTrace) {
  CountMin cm(2, 4, 1);
  const std::vector<std::uint32_t> a{0, 2}, b{1, 2};
  cm.update_buckets(a, 3);
  cm.update_buckets(b, 2);
  EXPECT_EQ(cm.at(0, 0), 3u);
  EXPECT_EQ(cm.at(0, 1), 2u);
  EXPECT_EQ(cm.at(0, 2), 0u);
  EXPECT_EQ(cm.at(0, 3), 0u);
  EXPECT_EQ(cm.at(1, 2), 5u);
  EXPECT_EQ(cm.query_buckets(a), 3u);
}

TEST(CountMinTest, EmptyQueriesZero) {
  CountMin cm(4, 32, 9);
  for (std::uint64_t h = 0; h < 100; ++h) EXPECT_EQ(cm.query(key_hash(encode_id(h))), 0u);
  EXPECT_TRUE(cm.empty());
}

TEST(CountMinTest, NeverUnderestimates) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = zipf_stream(2000, 50000, 1.1, seed);
    CountMin cm(3, 128, seed);
    for (const auto& it : g.trace.items) cm.update(key_hash(it.key), it.value);
    for (std::uint32_t i = 0; i < g.index.size(); ++i) EXPECT_GE(cm.query(key_hash(g.index.key(i))), g.truth[i]);
  }
}

TEST(CountMinTest, ConservativeUpdateRaisesMinimumOnly) {
  CountMin cm(2, 4, 1);
  std::vector<std::uint32_t> c(8, 0);
  c[0 * 4 + 1] = 5;
  c[1 * 4 + 3] = 3;
  cm.assign(c);
  const std::vector<std::uint32_t> key{1, 3};
  cm.update_buckets_conservative(key, 1);
  EXPECT_EQ(cm.at(0, 1), 5u);
  EXPECT_EQ(cm.at(1, 3), 4u);

  CountMin even(2, 4, 1);
  even.update_buckets(key, 3);
  even.update_buckets_conservative(key, 1);
  EXPECT_EQ(even.at(0, 1), 4u);
  EXPECT_EQ(even.at(1, 3), 4u);
}

TEST(CountMinTest, ConservativeDominatedByPlain) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = zipf_stream(2000, 50000, 1.1, seed);
    CountMin cm(3, 128, seed), cu(3, 128, seed);
    for (const auto& it : g.trace.items) {
      cm.update(key_hash(it.key), it.value);
      cu.update_conservative(key_hash(it.key), it.value);
    }
    for (std::uint32_t i = 0; i < g.index.size(); ++i) {
      const auto h = key_hash(g.index.key(i));
      EXPECT_LE(cu.query(h), cm.query(h));
      EXPECT_GE(cu.query(h), g.truth[i]);
    }
  }
}

TEST(CountMinTest, SaturationIsReported) {
  CountMin cm(1, 1, 1);
  cm.update(5, std::numeric_limits<std::uint32_t>::max());
  EXPECT_THROW(cm.update(5, 1), SaturationError);
}

TEST(CountMinTest, FlattenIsRowMajor) {
  CountMin cm(2, 2, 1);
  EXPECT_EQ(cm.flatten(), (std::vector<double>{0, 0, 0, 0}));
  const std::vector<std::uint32_t> c{1, 2, 3, 4};
  cm.assign(c);
  EXPECT_EQ(cm.flatten(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(cm.flatten(), cm.flatten());
}

TEST(CountMinTest, InstanceScale) {
  EXPECT_EQ(instance_scale(std::vector<double>{3, 2, 5, 0}, 2), 3.0);
  EXPECT_EQ(instance_scale(std::vector<double>{7}, 1), 7.0);
  EXPECT_THROW(instance_scale(std::vector<double>{0, 0}, 1), EmptySketchError);
}

TEST(CountSketchTest, FixtureSigns) {
  CountSketch cs(1, 4, 1);
  const std::vector<std::uint32_t> bucket{2};
  const std::vector<int> plus{1}, minus{-1};
  cs.update_buckets(bucket, plus, 3);
  cs.update_buckets(bucket, minus, 2);
  EXPECT_EQ(cs.counters()[2], 1);
  EXPECT_EQ(cs.query_buckets(bucket, plus), 1.0);
}

TEST(CountSketchTest, SingleKeyExact) {
  CountSketch cs(5, 16, 3);
  const auto h = key_hash("k");
  cs.update(h, 4);
  cs.update(h, 9);
  EXPECT_EQ(cs.query(h), 13.0);
}

TEST(CountSketchTest, RowEstimatorUnbiased) {
  const auto g = zipf_stream(500, 20000, 1.0, 4);
  const std::uint32_t probe = 10;
  std::vector<double> est;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CountSketch cs(1, 32, 1000 + seed);
    for (const auto& it : g.trace.items) cs.update(key_hash(it.key), it.value);
    est.push_back(cs.row_estimate(0, key_hash(g.index.key(probe))));
  }
  const double n = static_cast<double>(est.size());
  const double mean = std::accumulate(est.begin(), est.end(), 0.0) / n;
  double var = 0;
  for (double e : est) var += (e - mean) * (e - mean);
  const double se = std::sqrt(var / (n - 1) / n);
  EXPECT_NEAR(mean, g.truth[probe], 3 * se);
}

TEST(AugmentedSketchTest, HotKeyStaysExact) {
  AugmentedSketch ag(4, CountMin(2, 16, 1));
  for (int i = 0; i < 50; ++i) ag.update(77, 1);
  EXPECT_EQ(ag.query(77), 50.0);
  EXPECT_TRUE(ag.sketch().empty());
}

TEST(AugmentedSketchTest, ColdKeyRoutedWhenFull) {
  AugmentedSketch ag(2, CountMin(2, 16, 1));
  ag.update(1, 5);
  ag.update(2, 5);
  ag.update(3, 1);
  EXPECT_FALSE(ag.resident(3).has_value());
  EXPECT_GE(ag.sketch().query(3), 1u);
  EXPECT_EQ(ag.query(1), 5.0);
  EXPECT_EQ(ag.exchanges(), 0u);
}

TEST(AugmentedSketchTest, ExchangeFlushesResidual) {
  AugmentedSketch ag(1, CountMin(2, 16, 1));
  ag.update(1, 2);
  for (int i = 0; i < 3; ++i) ag.update(2, 1);
  EXPECT_EQ(ag.exchanges(), 1u);
  ASSERT_TRUE(ag.resident(2).has_value());
  EXPECT_GE(ag.query(1), 2.0);
  EXPECT_GE(ag.query(2), 3.0);
}

TEST(BloomTest, InsertThenContains) {
  BloomFilter bf(9600, 7, 3);
  EXPECT_FALSE(bf.contains(key_hash("fresh")));
  EXPECT_TRUE(bf.insert(key_hash("a")));
  EXPECT_TRUE(bf.contains(key_hash("a")));
  EXPECT_FALSE(bf.insert(key_hash("a")));
}

TEST(BloomTest, NoFalseNegativesAndAnalyticFpr) {
  BloomFilter bf(9600, 7, 21);
  for (std::uint64_t i = 0; i < 1000; ++i) bf.insert(key_hash(encode_id(i)));
  for (std::uint64_t i = 0; i < 1000; ++i) ASSERT_TRUE(bf.contains(key_hash(encode_id(i))));
  std::size_t fp = 0;
  const std::size_t probes = 100000;
  for (std::uint64_t i = 0; i < probes; ++i) fp += bf.contains(key_hash(encode_id(1000000 + i)));
  const double fpr = static_cast<double>(fp) / static_cast<double>(probes);
  const double analytic = std::pow(1 - std::exp(-7.0 * 1000 / 9600), 7);
  EXPECT_NEAR(bf.expected_fpr(1000), analytic, 1e-15);
  EXPECT_LT(analytic, 0.01);
  EXPECT_LE(fpr, 2 * analytic);
  EXPECT_GE(fpr, analytic / 2);
}

TEST(FilterTest, InstallHitAndAbsent) {
  AugmentedFilter f(1, 2, 8.0, 1);
  EXPECT_EQ(f.insert(10, 4).kind, FilterCase::kInstall);
  EXPECT_EQ(f.insert(10, 3).kind, FilterCase::kHit);
  EXPECT_EQ(f.query(10), 7u);
  EXPECT_EQ(f.query(11), 0u);
  EXPECT_EQ(f.vote(0), 0u);
}

TEST(FilterTest, EvictionHandTrace) {
  AugmentedFilter f(1, 2, 8.0, 1);
  const std::uint64_t a = 100, c = 200, cold = 300;
  f.insert(a, 1);
  f.insert(c, 5);
  const auto out = f.insert(cold, 9);
  EXPECT_EQ(out.kind, FilterCase::kEvicted);
  ASSERT_TRUE(out.spilled);
  EXPECT_EQ(out.spill_hash, a);
  EXPECT_EQ(out.spill_value, 1u);
  EXPECT_EQ(f.query(cold), 9u);
  EXPECT_EQ(f.query(a), 0u);
  EXPECT_EQ(f.query(c), 5u);
  EXPECT_EQ(f.vote(0), 0u);
}

TEST(FilterTest, RoutedBelowThreshold) {
  AugmentedFilter f(1, 2, 8.0, 1);
  f.insert(1, 2);
  f.insert(2, 5);
  const auto out = f.insert(3, 16);
  EXPECT_EQ(out.kind, FilterCase::kRouted);
  EXPECT_TRUE(out.spilled);
  EXPECT_EQ(out.spill_hash, 3u);
  EXPECT_EQ(out.spill_value, 16u);
  EXPECT_EQ(f.vote(0), 16u);
  EXPECT_EQ(f.query(3), 0u);
}

TEST(MemoryBudgetTest, Splits) {
  const auto b64 = allocate_memory(64 * 1024, 0);
  EXPECT_EQ(b64.bloom, 32u * 1024);
  EXPECT_EQ(b64.count_min, 16u * 1024);
  EXPECT_EQ(b64.filter, 16u * 1024);
  const auto b4m = allocate_memory(4 * 1024 * 1024, 0);
  EXPECT_EQ(b4m.count_min, kCountMinCapBytes);
  EXPECT_EQ(b4m.bloom + b4m.count_min + b4m.filter, b4m.total);
  EXPECT_GT(b4m.filter, b4m.total / 4);
  const auto capped = allocate_memory(64 * 1024, 1000);
  EXPECT_EQ(capped.bloom, 1200u);
  EXPECT_EQ(capped.bloom + capped.count_min + capped.filter, capped.total);
  EXPECT_THROW(allocate_memory(512, 0), ConfigError);
}

TEST(DataPlaneTest, MassConservationAndRowSums) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto g = zipf_stream(3000, 60000, 1.2, seed);
    FloreDataPlane plane(small_plane(seed));
    std::uint64_t total = 0;
    for (const auto& it : g.trace.items) {
      plane.insert(it.key, it.value);
      total += static_cast<std::uint64_t>(it.value);
    }
    EXPECT_EQ(plane.filter().resident_mass() + plane.stats().cm_mass, total);
    EXPECT_EQ(plane.stats().total_mass, total);
    const auto& cm = plane.cm();
    for (std::size_t r = 0; r < cm.rows(); ++r) {
      std::uint64_t row = 0;
      for (std::size_t c = 0; c < cm.width(); ++c) row += cm.at(r, c);
      EXPECT_EQ(row, plane.stats().cm_mass);
    }
  }
}

TEST(DataPlaneTest, ScaleBoundsLightTruth) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto g = zipf_stream(3000, 60000, 1.2, seed);
    FloreDataPlane plane(small_plane(seed));
    std::map<std::uint64_t, double> light;
    for (const auto& it : g.trace.items) {
      const auto r = plane.insert(it.key, it.value);
      if (r.cm_touched) light[r.cm_hash] += r.cm_value;
    }
    double top = 0;
    for (const auto& [h, v] : light) top = std::max(top, v);
    EXPECT_GE(instance_scale(plane.cm()), top);
  }
}

TEST(DataPlaneTest, RecordsEveryKeyOnce) {
  const auto g = zipf_stream(500, 10000, 1.0, 3);
  auto cfg = small_plane(3);
  cfg.bloom_bits = 500 * 10;
  FloreDataPlane plane(cfg);
  plane.insert(g.trace);
  const auto& keys = plane.recorded_keys();
  EXPECT_LE(keys.size(), g.index.size());
  EXPECT_GE(keys.size(), g.index.size() * 95 / 100);
  std::set<Key> unique(keys.begin(), keys.end());
  EXPECT_EQ(unique.size(), keys.size());
}

TEST(DataPlaneTest, Deterministic) {
  const auto g = zipf_stream(1000, 20000, 1.3, 2);
  FloreDataPlane a(small_plane(5)), b(small_plane(5));
  a.insert(g.trace);
  b.insert(g.trace);
  EXPECT_TRUE(std::equal(a.cm().counters().begin(), a.cm().counters().end(), b.cm().counters().begin()));
  EXPECT_EQ(a.recorded_keys(), b.recorded_keys());
}

TEST(DataPlaneTest, RejectsNonPositiveValues) {
  FloreDataPlane plane(small_plane(1));
  EXPECT_THROW(plane.insert("abcd", 0), ParameterError);
}

TEST(SnapshotTest, RoundTrip) {
  const auto g = zipf_stream(800, 20000, 1.3, 6);
  FloreDataPlane plane(small_plane(6));
  plane.insert(g.trace);
  std::stringstream buf;
  write_snapshot(buf, plane);
  const auto back = read_snapshot(buf);
  EXPECT_EQ(back.cm().flatten(), plane.cm().flatten());
  EXPECT_EQ(back.recorded_keys(), plane.recorded_keys());
  EXPECT_EQ(back.stats().cm_mass, plane.stats().cm_mass);
  EXPECT_EQ(back.filter().resident_mass(), plane.filter().resident_mass());
  for (std::uint32_t i = 0; i < g.index.size(); ++i)
    EXPECT_EQ(back.filter_query(g.index.key(i)), plane.filter_query(g.index.key(i)));
}

TEST(SnapshotTest, TruncationAndVersion) {
  FloreDataPlane plane(small_plane(1));
  plane.insert("abcd", 3);
  std::stringstream buf;
  write_snapshot(buf, plane);
  const std::string bytes = buf.str();
  std::istringstream cut(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(read_snapshot(cut), CorruptionError);
  std::string bumped = bytes;
  bumped[4] = static_cast<char>(kSnapshotVersion + 1);
  std::istringstream other(bumped);
  EXPECT_THROW(read_snapshot(other), IncompatibleError);
  std::string magic = bytes;
  magic[0] = 'X';
  std::istringstream wrong(magic);
  EXPECT_THROW(read_snapshot(wrong), CorruptionError);
}
