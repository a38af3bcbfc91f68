#include "flore/eval/report.hpp"

#include <charconv>

#include <nlohmann/json.hpp>

#include "flore/error.hpp"

namespace flore::eval {

using nlohmann::json;

std::size_t RunReport::failures() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.ok ? 0 : 1;
  return n;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw FormatError("cannot format value");
  return std::string(buf, end);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(cells[i]);
  }
  return line;
}

json seeds_json(const SeedSet& s) {
  return {{"master", s.master},   {"trace", s.trace},       {"permutation", s.permutation},
          {"plane", s.plane},     {"model", s.model},       {"train", s.train},
          {"recovery", s.recovery}, {"rip", s.rip},         {"perturb", s.perturb}};
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["output_dir"] = c.output_dir.string();
  if (c.trace.from_file) {
    j["trace"] = {{"file", {{"path", c.trace.path.string()}, {"key_length", c.trace.key_length}}}};
  } else {
    const auto& s = c.trace.synthetic;
    j["trace"] = {{"synthetic",
                   {{"distribution", std::string(to_string(s.kind))},
                    {"keys", s.keys},
                    {"items", s.total_items},
                    {"alpha", s.alpha},
                    {"x_min", s.x_min},
                    {"lambda", s.lambda},
                    {"mu", s.mu},
                    {"sigma", s.sigma},
                    {"key_length", s.key_length},
                    {"permute", s.permute}}}};
  }
  j["plane"] = {{"budgets", c.plane.budgets},
                {"expected_keys", c.plane.expected_keys},
                {"cm_rows", c.plane.cm_rows},
                {"filter_entries", c.plane.filter_entries},
                {"threshold", c.plane.threshold},
                {"bloom_hashes", c.plane.bloom_hashes}};
  j["baselines"] = {{"memory", c.baselines.memory == BaselineMemory::kTotal ? "total" : "plane-cm"},
                    {"ag_slots", c.baselines.ag_slots}};
  std::vector<std::string> est;
  for (auto e : c.estimators) est.push_back(to_string(e));
  j["estimators"] = est;
  j["refine"] = {{"steps", c.refine.steps},
                 {"accept_if_improves", c.refine.accept_if_improves},
                 {"epsilon", c.refine.epsilon}};
  j["solvers"] = {{"omp_sparsity", c.solvers.omp_sparsity},
                  {"omp_tol", c.solvers.omp_tol},
                  {"lsq_iters", c.solvers.lsq_iters},
                  {"lsq_tol", c.solvers.lsq_tol},
                  {"dense_limit", c.solvers.dense_limit}};
  const auto& m = c.flore.model;
  const auto& t = c.flore.train;
  j["flore"] = {
      {"snapshot_interval", c.flore.snapshot_interval},
      {"window", c.flore.window},
      {"model",
       {{"latent", m.latent},
        {"hidden", m.hidden},
        {"blocks", m.blocks},
        {"ae_hidden", m.ae_hidden},
        {"coupling", to_string(m.coupling)},
        {"clamp", m.clamp},
        {"conditional", m.conditional},
        {"segment_length", m.segment_length},
        {"max_segments", m.max_segments},
        {"cond_dim", m.cond_dim}}},
      {"train",
       {{"epochs", t.epochs},
        {"batch", t.batch},
        {"learning_rate", t.learning_rate},
        {"beta1", t.beta1},
        {"beta2", t.beta2},
        {"adam_eps", t.adam_eps},
        {"shuffle", t.shuffle},
        {"resample_z", t.resample_z},
        {"discrepancy", to_string(t.loss.discrepancy)},
        {"weights",
         {{"rec", t.loss.weights.rec}, {"inv", t.loss.weights.inv}, {"ort", t.loss.weights.ort},
          {"sp", t.loss.weights.sp}}},
        {"terms",
         {{"con", t.loss.terms.con},
          {"rec", t.loss.terms.rec},
          {"inv", t.loss.terms.inv},
          {"ort", t.loss.terms.ort},
          {"sp", t.loss.terms.sp}}}}}};
  j["metrics"] = {{"heavy_hitters", c.heavy_hitters}};
  j["timing"] = {{"passes", c.timing_passes}};
  j["rip"] = {{"m", c.rip.m},   {"n", c.rip.n},             {"s", c.rip.s},
              {"trials", c.rip.trials}, {"cm_rows", c.rip.cm_rows}, {"kinds", c.rip.kinds}};
  j["ablation"] = {{"variants", c.ablation.variants}, {"budget", c.ablation.budget}};
  j["robustness"] = {{"temporal", c.robustness.temporal},
                     {"natural", c.robustness.natural},
                     {"spatial", c.robustness.spatial},
                     {"budget", c.robustness.budget}};
  j["seeds"] = seeds_json(c.seeds);
  return j;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::string expected = join(header);
  bool fresh = true;
  if (std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    if (first != expected) throw FormatError(path.string() + ": existing header does not match report schema");
    fresh = false;
  }
  out_.open(path, std::ios::app);
  if (!out_) throw FormatError("cannot open " + path.string() + " for writing");
  if (fresh) out_ << expected << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ShapeError("CSV row width does not match the header");
  out_ << join(cells) << '\n';
  out_.flush();
}

std::vector<std::string> metrics_header() {
  return {"schema",         "run",         "estimator",     "budget_bytes", "status",     "aae",
          "are",            "wmre",        "entropy_ae",    "f1",           "precision",  "recall",
          "consistency",    "summary_ns_per_item", "recovery_ms", "train_ms", "seed_master", "seed_trace",
          "seed_permutation", "seed_plane", "seed_model",   "seed_train",   "seed_recovery", "seed_rip",
          "seed_perturb",   "error"};
}

std::vector<std::string> metrics_cells(const ReportRow& r) {
  const auto& m = r.metrics;
  const auto& s = r.seeds;
  return {std::to_string(kReportSchemaVersion),
          r.run,
          r.estimator,
          std::to_string(r.budget),
          r.ok ? "ok" : "failed",
          format_double(m.aae),
          format_double(m.are),
          format_double(m.wmre),
          format_double(m.entropy_ae),
          format_double(m.f1),
          format_double(m.precision),
          format_double(m.recall),
          format_double(r.consistency),
          format_double(r.summary_ns_per_item),
          format_double(r.recovery_ms),
          format_double(r.train_ms),
          std::to_string(s.master),
          std::to_string(s.trace),
          std::to_string(s.permutation),
          std::to_string(s.plane),
          std::to_string(s.model),
          std::to_string(s.train),
          std::to_string(s.recovery),
          std::to_string(s.rip),
          std::to_string(s.perturb),
          r.error};
}

std::vector<std::string> curve_header() {
  return {"schema", "run", "estimator", "budget_bytes", "epoch", "total", "con", "rec", "inv", "ort", "sp"};
}

std::vector<std::string> curve_cells(const CurvePoint& p) {
  return {std::to_string(kReportSchemaVersion), p.run, p.estimator, std::to_string(p.budget), std::to_string(p.epoch),
          format_double(p.loss.total), format_double(p.loss.con), format_double(p.loss.rec),
          format_double(p.loss.inv), format_double(p.loss.ort), format_double(p.loss.sp)};
}

void append_metrics(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  CsvWriter w(path, metrics_header());
  for (const auto& r : rows) w.row(metrics_cells(r));
}

void append_curves(const std::filesystem::path& path, const std::vector<CurvePoint>& curves) {
  CsvWriter w(path, curve_header());
  for (const auto& p : curves) w.row(curve_cells(p));
}

std::string config_json(const ExperimentConfig& config) { return config_to_json(config).dump(2); }

std::string manifest_json(const ExperimentConfig& config, const RunReport& report) {
  json j;
  j["schema"] = kReportSchemaVersion;
  j["config"] = config_to_json(config);
  j["seeds"] = seeds_json(config.seeds);
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"run", r.run},
                    {"estimator", r.estimator},
                    {"budget_bytes", r.budget},
                    {"status", r.ok ? "ok" : "failed"},
                    {"error", r.error},
                    {"metrics",
                     {{"aae", r.metrics.aae},
                      {"are", r.metrics.are},
                      {"wmre", r.metrics.wmre},
                      {"entropy_ae", r.metrics.entropy_ae},
                      {"f1", r.metrics.f1},
                      {"precision", r.metrics.precision},
                      {"recall", r.metrics.recall}}},
                    {"consistency", r.consistency},
                    {"timing",
                     {{"summary_ns_per_item", r.summary_ns_per_item},
                      {"recovery_ms", r.recovery_ms},
                      {"train_ms", r.train_ms}}},
                    {"seeds", seeds_json(r.seeds)}});
  }
  j["rows"] = rows;
  j["failures"] = report.failures();
  return j.dump(2);
}

void write_manifest(const std::filesystem::path& path, const ExperimentConfig& config, const RunReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << manifest_json(config, report) << '\n';
}

}  // namespace flore::eval
