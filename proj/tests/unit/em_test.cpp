#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "flore/em/em_refine.hpp"
#include "flore/error.hpp"
#include "flore/linsys/sketch_operator.hpp"
#include "flore/random.hpp"
#include "flore/sketch/count_min.hpp"
#include "flore/sketch/hash.hpp"
#include "flore/stream/generator.hpp"

using namespace flore;

namespace {

std::vector<std::uint64_t> id_hashes(std::size_t n) {
  std::vector<std::uint64_t> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = key_hash(encode_id(i));
  return h;
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

struct Instance {
  SketchOperator op;
  std::vector<double> b;
  std::vector<double> truth;
};

Instance zipf_instance(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.keys = 400;
  spec.total_items = 20000;
  spec.alpha = 1.2;
  spec.rng_seed = seed;
  spec.permutation_seed = seed;
  const auto g = generate_stream(spec);
  CountMin cm(4, 20, seed);
  for (const auto& it : g.trace.items) cm.update(key_hash(it.key), it.value);
  return {build_operator(cm.hash(), g.index), cm.flatten(), g.truth};
}

}  // namespace

TEST(EmStep, HandExample) {
  const SketchOperator op(HashFamily(1, 1, 1), id_hashes(2));
  const std::vector<double> b{3}, f{1, 1};
  const auto next = em_step(op, b, f, 0.0);
  EXPECT_DOUBLE_EQ(next[0], 1.5);
  EXPECT_DOUBLE_EQ(next[1], 1.5);
  EXPECT_DOUBLE_EQ(op.apply(next)[0], 3.0);
}

TEST(EmStep, ConsistentVectorIsFixedPoint) {
  const SketchOperator op(HashFamily(4, 16, 3), id_hashes(100));
  Rng rng(2);
  std::vector<double> f(100);
  for (auto& v : f) v = 1.0 + static_cast<double>(rng.below(40));
  const auto b = op.apply(f);
  const auto next = em_step(op, b, f);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(next[i], f[i], 1e-12 * f[i]);
}

TEST(EmStep, ZerosStayZero) {
  const auto inst = zipf_instance(4);
  auto f = em_initial(inst.op, inst.b);
  for (std::size_t i = 0; i < f.size(); i += 3) f[i] = 0.0;
  auto g = f;
  for (int s = 0; s < 10; ++s) {
    g = em_step(inst.op, inst.b, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_GE(g[i], 0.0);
      if (f[i] == 0.0) EXPECT_EQ(g[i], 0.0);
    }
  }
}

TEST(EmStep, RejectsBadInput) {
  const SketchOperator signed_op(HashFamily(2, 4, 1), id_hashes(5), OperatorMode::kCountSketch);
  const std::vector<double> b(8, 1.0), f(5, 1.0);
  EXPECT_THROW(em_step(signed_op, b, f), ParameterError);
  const SketchOperator op(HashFamily(2, 4, 1), id_hashes(5));
  EXPECT_THROW(em_step(op, b, std::vector<double>(5, 0.0)), ParameterError);
  std::vector<double> neg(5, 1.0);
  neg[2] = -1;
  EXPECT_THROW(em_step(op, b, neg), ParameterError);
}

TEST(EmStep, UnguardedZeroDenominator) {
  const SketchOperator op(HashFamily(1, 1, 1), id_hashes(2));
  const std::vector<double> b{3}, f{0, 0};
  EXPECT_THROW(em_step(op, b, f, 0.0), Error);
}

TEST(EmRefine, ConsistentStartUnchanged) {
  const SketchOperator op(HashFamily(3, 10, 7), id_hashes(50));
  std::vector<double> f(50);
  std::iota(f.begin(), f.end(), 1.0);
  const auto b = op.apply(f);
  const auto r = em_refine(op, b, f, EmConfig{5, true, 1e-12});
  EXPECT_EQ(r.f, f);
  EXPECT_EQ(r.accepted, 0u);
}

TEST(EmRefine, ResidualsNeverIncrease) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = zipf_instance(seed);
    const auto f0 = em_initial(inst.op, inst.b);
    const auto r = em_refine(inst.op, inst.b, f0, EmConfig{10, true, 1e-12});
    ASSERT_EQ(r.residuals.size(), r.accepted + 1);
    EXPECT_DOUBLE_EQ(r.residuals.front(), l1_residual(inst.op, inst.b, f0));
    EXPECT_DOUBLE_EQ(r.residuals.back(), l1_residual(inst.op, inst.b, r.f));
    for (std::size_t i = 1; i < r.residuals.size(); ++i) EXPECT_LE(r.residuals[i], r.residuals[i - 1]);
  }
}

TEST(EmRefine, Deterministic) {
  const auto inst = zipf_instance(9);
  const auto f0 = em_initial(inst.op, inst.b);
  EXPECT_EQ(em_refine(inst.op, inst.b, f0, {}).f, em_refine(inst.op, inst.b, f0, {}).f);
}

TEST(EmInitial, ClampsAtOne) {
  const SketchOperator op(HashFamily(2, 8, 1), id_hashes(20));
  const auto f = em_initial(op, std::vector<double>(16, 0.0));
  for (double v : f) EXPECT_EQ(v, 1.0);
}

TEST(Normalize, HandExample) {
  const HashFamily hash(1, 2, 5);
  std::vector<std::uint64_t> keys;
  for (std::uint64_t i = 0; keys.size() < 2; ++i) {
    const auto h = key_hash(encode_id(i));
    if (hash.bucket(0, h) == keys.size()) keys.push_back(h);
  }
  const SketchOperator op(hash, keys);
  const std::vector<double> b{2, 2}, f0{2, 2};
  const auto p = normalize_problem(op, b, f0);
  EXPECT_EQ(p.b, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(p.f0, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(p.mass, 4.0);
  EXPECT_THROW(normalize_problem(op, std::vector<double>{0, 0}, f0), ParameterError);
}

TEST(Normalize, RoundTripAndSimplex) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = zipf_instance(seed);
    const auto f0 = em_initial(inst.op, inst.b);
    const auto p = normalize_problem(inst.op, inst.b, f0);
    const auto back = denormalize(p.f0, p);
    for (std::size_t i = 0; i < f0.size(); ++i) EXPECT_NEAR(back[i], f0[i], 1e-12 * f0[i]);
    EXPECT_NEAR(sum(p.b), 1.0, 1e-12);
    auto g = p.f0;
    for (int s = 0; s < 5; ++s) {
      g = em_step(inst.op, p.b, g, 0.0, p.phi_scale());
      EXPECT_NEAR(sum(g), 1.0, 1e-12);
    }
  }
}

TEST(EmConfigTest, Validates) {
  EXPECT_THROW((EmConfig{0, true, 1e-12}).validate(), Error);
  EXPECT_THROW((EmConfig{3, true, -1.0}).validate(), Error);
}
