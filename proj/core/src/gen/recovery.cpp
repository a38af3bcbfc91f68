#include "flore/gen/recovery.hpp"

#include <cmath>

#include "flore/error.hpp"
#include "flore/gen/trainer.hpp"
#include "flore/sketch/hash.hpp"

namespace flore {

SketchOperator plane_operator(const FloreDataPlane& plane) { return plane_operator(plane, plane.recorded_keys()); }

SketchOperator plane_operator(const FloreDataPlane& plane, std::span<const Key> keys) {
  std::vector<std::uint64_t> hashes;
  hashes.reserve(keys.size());
  for (const auto& k : keys) hashes.push_back(key_hash(k));
  return SketchOperator(plane.cm().hash(), hashes, OperatorMode::kCountMin);
}

RecoveryResult recover(const FloreDataPlane& plane, const FloreModel& model, std::uint64_t seed) {
  return recover(plane, model, seed, plane.recorded_keys());
}

RecoveryResult recover(const FloreDataPlane& plane, const FloreModel& model, std::uint64_t seed,
                       std::span<const Key> keys) {
  RecoveryResult out;
  out.keys.assign(keys.begin(), keys.end());
  const std::size_t n = out.keys.size();
  const auto& cfg = model.config();
  if (cfg.keys != n) throw ShapeError("model expects " + std::to_string(cfg.keys) + " keys, got " + std::to_string(n));
  if (cfg.counters != plane.cm().size()) throw ShapeError("model counter width does not match the plane");
  out.sketch_part.assign(n, 0.0);
  if (plane.cm().empty()) {
    out.empty_sketch = true;
  } else {
    const std::vector<double> b = plane.cm().flatten();
    out.scale = instance_scale(b, plane.cm().rows());
    ad::Mat bn(1, static_cast<Eigen::Index>(b.size()));
    for (std::size_t j = 0; j < b.size(); ++j) bn(0, static_cast<Eigen::Index>(j)) = b[j] / out.scale;
    const ad::Mat z = sample_latent(cfg.segments(), cfg.d_z(), seed);
    const ad::Mat f = model.generate(bn, z);
    for (std::size_t i = 0; i < n; ++i)
      out.sketch_part[i] = std::round(std::max(0.0, out.scale * f(0, static_cast<Eigen::Index>(i))));
  }
  out.estimate = out.sketch_part;
  for (std::size_t i = 0; i < n; ++i) out.estimate[i] += plane.filter_query(out.keys[i]);
  return out;
}

FrequencyVector align_to_index(const RecoveryResult& result, const KeyIndex& universe) {
  FrequencyVector f(universe.size(), 0.0);
  for (std::size_t i = 0; i < result.keys.size(); ++i)
    if (auto idx = universe.find(result.keys[i])) f[*idx] = result.estimate[i];
  return f;
}

}  // namespace flore
