#pragma once

#include <filesystem>
#include <iosfwd>

#include "flore/sketch/data_plane.hpp"

namespace flore {

/// Versioned little-endian data-plane snapshot:
///   "FLDP" u32 version | config block | stats | CM counters | filter votes,
///   fingerprints, counters | Bloom words | recorded keys.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const FloreDataPlane& plane);
/// Throws CorruptionError on truncated/damaged input and IncompatibleError on
/// a version mismatch.
FloreDataPlane read_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const FloreDataPlane& plane);
FloreDataPlane load_snapshot(const std::filesystem::path& path);

}  // namespace flore
