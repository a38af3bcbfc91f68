#include "flore/eval/rip_bench.hpp"

#include "flore/error.hpp"
#include "flore/eval/report.hpp"
#include "flore/linsys/cs_matrix.hpp"
#include "flore/linsys/rip.hpp"
#include "flore/random.hpp"
#include "flore/sketch/hash.hpp"

namespace flore::eval {

std::vector<RipRow> rip_bench(const RipSettings& settings, std::uint64_t seed) {
  if (settings.m > settings.n) throw ParameterError("rip bench needs m <= N");
  const std::uint64_t probe_seed = derive_seed(seed, 0);
  std::vector<RipRow> rows;
  for (std::size_t idx = 0; idx < settings.kinds.size(); ++idx) {
    const auto& kind = settings.kinds[idx];
    RipRow row{kind, settings.m, settings.n, settings.s, settings.trials, derive_seed(seed, 1 + idx), 0.0};
    if (kind == "CM" || kind == "CS") {
      const std::size_t width = settings.m / settings.cm_rows;
      if (width == 0) throw ParameterError("rip bench: m smaller than the band count");
      std::vector<std::uint64_t> hashes;
      hashes.reserve(settings.n);
      for (std::size_t i = 0; i < settings.n; ++i) hashes.push_back(key_hash(encode_id(i)));
      const SketchOperator op(HashFamily(settings.cm_rows, width, row.seed), hashes,
                              kind == "CM" ? OperatorMode::kCountMin : OperatorMode::kCountSketch);
      row.m = op.rows();
      row.distance = rip_distance(op, settings.s, settings.trials, probe_seed);
    } else {
      const auto a = make_cs_matrix({parse_ensemble(kind), settings.m, settings.n, row.seed});
      row.distance = rip_distance(a, settings.s, settings.trials, probe_seed);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> rip_header() { return {"schema", "kind", "m", "n", "s", "trials", "seed", "distance"}; }

void append_rip(const std::filesystem::path& path, const std::vector<RipRow>& rows) {
  CsvWriter w(path, rip_header());
  for (const auto& r : rows)
    w.row({std::to_string(kReportSchemaVersion), r.kind, std::to_string(r.m), std::to_string(r.n), std::to_string(r.s),
           std::to_string(r.trials), std::to_string(r.seed), format_double(r.distance)});
}

}  // namespace flore::eval
