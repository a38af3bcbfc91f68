#include "flore/sketch/snapshot_io.hpp"

#include <fstream>

#include "../common/binary_io.hpp"

namespace flore {

using detail::BinaryReader;
using detail::BinaryWriter;

void write_snapshot(std::ostream& out, const FloreDataPlane& plane) {
  BinaryWriter w(out);
  const auto& c = plane.config();
  w.put_magic("FLDP");
  w.put<std::uint32_t>(kSnapshotVersion);
  w.put<std::uint64_t>(c.cm_rows);
  w.put<std::uint64_t>(c.cm_width);
  w.put<std::uint64_t>(c.filter_arrays);
  w.put<std::uint64_t>(c.filter_entries);
  w.put<double>(c.threshold);
  w.put<std::uint64_t>(c.bloom_bits);
  w.put<std::uint64_t>(c.bloom_hashes);
  w.put<std::uint64_t>(c.seed);

  const auto& s = plane.stats();
  for (std::uint64_t v : {s.items, s.total_mass, s.cm_mass, s.hits, s.installs, s.routed, s.evictions, s.new_keys})
    w.put<std::uint64_t>(v);

  w.put_array(plane.cm().counters());
  w.put_array(plane.filter().votes());
  w.put_array(plane.filter().fingerprints());
  w.put_array(plane.filter().counts());
  w.put<std::uint64_t>(plane.bloom().inserted());
  w.put_array(plane.bloom().words());
  w.put<std::uint64_t>(plane.recorded_keys().size());
  for (const auto& k : plane.recorded_keys()) w.put_string(k);
  w.check();
}

FloreDataPlane read_snapshot(std::istream& in) {
  BinaryReader r(in);
  r.expect_magic("FLDP");
  const auto version = r.get<std::uint32_t>();
  if (version != kSnapshotVersion)
    throw IncompatibleError("snapshot version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kSnapshotVersion) + ")");
  DataPlaneConfig c;
  c.cm_rows = r.get<std::uint64_t>();
  c.cm_width = r.get<std::uint64_t>();
  c.filter_arrays = r.get<std::uint64_t>();
  c.filter_entries = r.get<std::uint64_t>();
  c.threshold = r.get<double>();
  c.bloom_bits = r.get<std::uint64_t>();
  c.bloom_hashes = r.get<std::uint64_t>();
  c.seed = r.get<std::uint64_t>();
  if (c.cm_rows > 64 || c.cm_width > (1u << 28) || c.filter_entries > 1024 || c.filter_arrays > (1u << 28) ||
      c.bloom_bits > (std::uint64_t{1} << 36))
    throw CorruptionError("implausible snapshot geometry");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw CorruptionError(std::string("invalid snapshot config: ") + e.what());
  }

  PlaneStats s;
  for (std::uint64_t* v : {&s.items, &s.total_mass, &s.cm_mass, &s.hits, &s.installs, &s.routed, &s.evictions,
                           &s.new_keys})
    *v = r.get<std::uint64_t>();

  FloreDataPlane plane(c);
  const auto counters = r.get_array<std::uint32_t>(c.cm_rows * c.cm_width);
  const auto votes = r.get_array<std::uint32_t>(c.filter_arrays);
  const auto fps = r.get_array<std::uint64_t>(c.filter_arrays * c.filter_entries);
  const auto counts = r.get_array<std::uint32_t>(c.filter_arrays * c.filter_entries);
  const auto inserted = r.get<std::uint64_t>();
  const auto words = r.get_array<std::uint64_t>((c.bloom_bits + 63) / 64);
  const auto n_keys = r.get<std::uint64_t>();
  if (n_keys > inserted) throw CorruptionError("more recorded keys than Bloom insertions");
  std::vector<Key> keys;
  keys.reserve(n_keys);
  for (std::uint64_t i = 0; i < n_keys; ++i) keys.push_back(r.get_string());
  r.expect_end();

  plane.mutable_cm().assign(counters);
  plane.mutable_filter().assign(votes, fps, counts);
  plane.mutable_bloom().assign(words, inserted);
  plane.restore(s, std::move(keys));
  return plane;
}

void save_snapshot(const std::filesystem::path& path, const FloreDataPlane& plane) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_snapshot(out, plane);
}

FloreDataPlane load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace flore
