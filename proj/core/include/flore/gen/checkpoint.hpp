#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "flore/gen/model.hpp"

namespace flore {

/// "FLCK" | u32 version | architecture header | tensors (name, rows, cols,
/// raw doubles), little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const FloreModel& model);
/// Throws CorruptionError for damaged input and IncompatibleError for a
/// version mismatch or an architecture different from `expected`.
FloreModel read_checkpoint(std::istream& in, const std::optional<ModelConfig>& expected = std::nullopt);

void save_checkpoint(const std::filesystem::path& path, const FloreModel& model);
FloreModel load_checkpoint(const std::filesystem::path& path, const std::optional<ModelConfig>& expected = std::nullopt);

}  // namespace flore
