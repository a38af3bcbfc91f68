#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flore/gen/model.hpp"
#include "flore/linsys/sketch_operator.hpp"
#include "flore/sketch/data_plane.hpp"

namespace flore {

struct RecoveryResult {
  FrequencyVector estimate;     // per recorded key: sketch part + filter part
  FrequencyVector sketch_part;  // generative estimate of the light part
  std::vector<Key> keys;        // recorded keys, aligned with estimate
  double scale = 0.0;
  bool empty_sketch = false;    // no light mass: the sketch part is all zero
};

/// Operator for the plane's Count-Min over its recorded keys.
SketchOperator plane_operator(const FloreDataPlane& plane);
SketchOperator plane_operator(const FloreDataPlane& plane, std::span<const Key> keys);

/// Flattens the counters, normalizes by the instance scale, draws z from
/// `seed`, runs G, rescales, clamps at zero and rounds, then adds the
/// filter's exact counts. Throws ShapeError when the model was built for a
/// different key count or counter width.
RecoveryResult recover(const FloreDataPlane& plane, const FloreModel& model, std::uint64_t seed);

/// Same, for an explicit key list (e.g. the keys a model was trained on when
/// it is applied to a different plane with identical hashing). The model's
/// N must equal keys.size().
RecoveryResult recover(const FloreDataPlane& plane, const FloreModel& model, std::uint64_t seed,
                       std::span<const Key> keys);

/// Maps per-key estimates onto a universe index; keys never recorded get 0.
FrequencyVector align_to_index(const RecoveryResult& result, const KeyIndex& universe);

}  // namespace flore
