#include "flore/eval/ablation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "flore/error.hpp"
#include "flore/eval/pipeline.hpp"

namespace flore::eval {

LossOptions ablation_loss(const LossOptions& base, const std::string& variant) {
  LossOptions o = base;
  auto& t = o.terms;
  auto& w = o.weights;
  if (variant == "full") return o;
  if (variant == "naive") {
    t.rec = t.inv = t.ort = false;
    w.rec = w.inv = w.ort = 0.0;
  } else if (variant == "no-sp") {
    t.sp = false;
    w.sp = 0.0;
  } else if (variant == "no-ort") {
    t.ort = false;
    w.ort = 0.0;
  } else if (variant == "no-rec") {
    t.rec = false;
    w.rec = 0.0;
  } else if (variant == "no-con") {
    t.con = false;
  } else {
    throw ConfigError("unknown ablation variant '" + variant + "'");
  }
  return o;
}

ExperimentConfig ablation_config(const ExperimentConfig& base, const std::string& variant) {
  ExperimentConfig c = base;
  c.name = base.name + "/" + variant;
  c.flore.train.loss = ablation_loss(base.flore.train.loss, variant);
  c.estimators = {Estimator::kFlore};
  return c;
}

namespace {

std::vector<CdfPoint> error_cdf(const std::string& variant, std::span<const double> est, std::span<const double> truth) {
  std::vector<double> abs_err(est.size()), rel_err(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    abs_err[i] = std::abs(est[i] - truth[i]);
    rel_err[i] = abs_err[i] / std::max(truth[i], 1.0);
  }
  std::sort(abs_err.begin(), abs_err.end());
  std::sort(rel_err.begin(), rel_err.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(est.size());
  for (std::size_t i = 0; i < abs_err.size(); ++i) out.push_back({variant, "abs", (i + 1) / n, abs_err[i]});
  for (std::size_t i = 0; i < rel_err.size(); ++i) out.push_back({variant, "rel", (i + 1) / n, rel_err[i]});
  return out;
}

}  // namespace

AblationResult ablate(const ExperimentConfig& config, const std::vector<std::string>& variants) {
  config.validate();
  AblationResult out;
  const Workload work = load_workload(config);
  const std::size_t budget = config.ablation.budget ? config.ablation.budget : config.plane.budgets.front();
  const std::size_t hh = config.heavy_hitters ? config.heavy_hitters : default_heavy_hitter_count(work.universe.size());
  const auto run = summarize(work, plane_config(config, budget, work.universe.size()), config.flore.snapshot_interval,
                             config.flore.window);

  for (const auto& variant : variants) {
    ReportRow row;
    row.run = config.name;
    row.estimator = "flore/" + variant;
    row.budget = budget;
    row.seeds = config.seeds;
    try {
      const auto vc = ablation_config(config, variant);
      out.configs.push_back(vc);
      const auto t0 = std::chrono::steady_clock::now();
      auto fit = fit_flore(run, vc.flore, TargetSource::kEm, vc.refine);
      row.train_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (fit.history.diverged) throw NumericError("training diverged");
      for (std::size_t i = 0; i < fit.history.epochs.size(); ++i)
        out.report.curves.push_back({config.name, row.estimator, budget, i, fit.history.epochs[i]});
      const auto t1 = std::chrono::steady_clock::now();
      const auto result = recover(run.plane, fit.model, vc.seeds.recovery);
      const auto est = align_to_index(result, work.universe);
      row.recovery_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t1).count();
      row.metrics = compute_metrics(est, work.truth, hh);
      row.consistency = consistency(run.plane, result);
      auto cdf = error_cdf(variant, est, work.truth);
      out.cdf.insert(out.cdf.end(), cdf.begin(), cdf.end());
    } catch (const std::exception& ex) {
      row.ok = false;
      row.error = ex.what();
    }
    out.report.rows.push_back(std::move(row));
  }
  return out;
}

void append_cdf(const std::filesystem::path& path, const std::string& run, const std::vector<CdfPoint>& cdf) {
  CsvWriter w(path, {"schema", "run", "variant", "error", "quantile", "value"});
  for (const auto& p : cdf)
    w.row({std::to_string(kReportSchemaVersion), run, p.variant, p.kind, format_double(p.quantile),
           format_double(p.value)});
}

}  // namespace flore::eval
