#include "flore/gen/checkpoint.hpp"

#include <fstream>

#include "../common/binary_io.hpp"
#include "flore/error.hpp"

namespace flore {

using detail::BinaryReader;
using detail::BinaryWriter;

void write_checkpoint(std::ostream& out, const FloreModel& model) {
  BinaryWriter w(out);
  const auto& c = model.config();
  w.put_magic("FLCK");
  w.put<std::uint32_t>(kCheckpointVersion);
  for (std::uint64_t v : {std::uint64_t{c.keys}, std::uint64_t{c.counters}, std::uint64_t{c.latent},
                          std::uint64_t{c.hidden}, std::uint64_t{c.blocks}, std::uint64_t{c.ae_hidden},
                          static_cast<std::uint64_t>(c.coupling), std::uint64_t{c.conditional},
                          std::uint64_t{c.segment_length}, std::uint64_t{c.max_segments}, std::uint64_t{c.cond_dim},
                          c.seed})
    w.put<std::uint64_t>(v);
  w.put<double>(c.clamp);
  const auto& params = model.parameters().all();
  w.put<std::uint64_t>(params.size());
  for (const auto& p : params) {
    w.put_string(p.name);
    w.put<std::uint64_t>(static_cast<std::uint64_t>(p.value.rows()));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(p.value.cols()));
    w.put_array(std::span<const double>(p.value.data(), static_cast<std::size_t>(p.value.size())));
  }
  w.check();
}

FloreModel read_checkpoint(std::istream& in, const std::optional<ModelConfig>& expected) {
  BinaryReader r(in);
  r.expect_magic("FLCK");
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw IncompatibleError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kCheckpointVersion) + ")");
  ModelConfig c;
  std::uint64_t raw[12];
  for (auto& v : raw) v = r.get<std::uint64_t>();
  c.keys = raw[0];
  c.counters = raw[1];
  c.latent = raw[2];
  c.hidden = raw[3];
  c.blocks = raw[4];
  c.ae_hidden = raw[5];
  if (raw[6] > 2) throw CorruptionError("unknown coupling kind in checkpoint");
  c.coupling = static_cast<CouplingKind>(raw[6]);
  c.conditional = raw[7] != 0;
  c.segment_length = raw[8];
  c.max_segments = raw[9];
  c.cond_dim = raw[10];
  c.seed = raw[11];
  c.clamp = r.get<double>();
  for (std::size_t i = 0; i < 6; ++i)
    if (raw[i] > (1u << 26)) throw CorruptionError("implausible model dimension in checkpoint");
  if (expected && !expected->same_architecture(c))
    throw IncompatibleError("checkpoint architecture does not match the expected model (blocks " +
                            std::to_string(c.blocks) + " vs " + std::to_string(expected->blocks) + ", latent " +
                            std::to_string(c.latent) + " vs " + std::to_string(expected->latent) + ")");
  FloreModel model = [&] {
    try {
      return FloreModel(c);
    } catch (const ConfigError& e) {
      throw CorruptionError(std::string("invalid architecture in checkpoint: ") + e.what());
    }
  }();
  auto& params = model.parameters().all();
  const auto count = r.get<std::uint64_t>();
  if (count != params.size()) throw CorruptionError("tensor count does not match the architecture");
  for (auto& p : params) {
    const std::string name = r.get_string();
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    if (name != p.name || rows != static_cast<std::uint64_t>(p.value.rows()) ||
        cols != static_cast<std::uint64_t>(p.value.cols()))
      throw CorruptionError("tensor '" + name + "' does not match the architecture");
    const auto data = r.get_array<double>(static_cast<std::size_t>(rows * cols));
    std::copy(data.begin(), data.end(), p.value.data());
  }
  r.expect_end();
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const FloreModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, model);
}

FloreModel load_checkpoint(const std::filesystem::path& path, const std::optional<ModelConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_checkpoint(in, expected);
}

}  // namespace flore
