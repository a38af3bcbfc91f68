#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flore/em/em_refine.hpp"
#include "flore/error.hpp"
#include "flore/eval/ablation.hpp"
#include "flore/eval/config.hpp"
#include "flore/eval/experiment.hpp"
#include "flore/eval/pipeline.hpp"
#include "flore/eval/report.hpp"
#include "flore/eval/rip_bench.hpp"
#include "flore/eval/robustness.hpp"
#include "flore/gen/checkpoint.hpp"
#include "flore/gen/recovery.hpp"
#include "flore/sketch/snapshot_io.hpp"
#include "flore/stream/trace_io.hpp"

namespace fs = std::filesystem;
using namespace flore;
using namespace flore::eval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig load(const Common& c, bool required) {
  ExperimentConfig cfg;
  if (!c.config.empty()) cfg = load_config(c.config);
  else if (required) throw ConfigError("--config is required for this command");
  if (c.seed) cfg.set_seed(*c.seed);
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

std::size_t pick_budget(const ExperimentConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return parse_bytes(flag);
  if (cfg.plane.budgets.empty()) throw ConfigError("no budget given and none in the config");
  return cfg.plane.budgets.front();
}

void write_estimates(const fs::path& path, const std::vector<Key>& keys, const std::vector<double>& values) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string());
  out << "key,estimate\n";
  for (std::size_t i = 0; i < keys.size(); ++i) out << to_hex(keys[i]) << ',' << format_double(values[i]) << '\n';
}

void print_rows(const std::vector<ReportRow>& rows) {
  std::printf("%-16s %10s %12s %10s %10s %6s %s\n", "estimator", "budget", "aae", "are", "wmre", "f1", "status");
  for (const auto& r : rows)
    std::printf("%-16s %10zu %12.4f %10.4f %10.4f %6.3f %s\n", r.estimator.c_str(), r.budget, r.metrics.aae,
                r.metrics.are, r.metrics.wmre, r.metrics.f1, r.ok ? "ok" : ("failed: " + r.error).c_str());
}

int cmd_generate(const Common& c) {
  auto cfg = load(c, true);
  if (cfg.trace.from_file) throw ConfigError("generate needs a synthetic trace section");
  const auto work = load_workload(cfg);
  const auto path = cfg.output_dir / "trace.csv";
  fs::create_directories(cfg.output_dir);
  save_trace(path, work.trace);
  std::printf("wrote %zu items over %zu keys to %s\n", work.trace.size(), work.universe.size(), path.c_str());
  return kExitOk;
}

int cmd_summarize(const Common& c, const std::string& budget_flag) {
  auto cfg = load(c, true);
  const auto work = load_workload(cfg);
  const auto pc = plane_config(cfg, pick_budget(cfg, budget_flag), work.universe.size());
  FloreDataPlane plane(pc);
  plane.insert(work.trace);
  const auto path = cfg.output_dir / "plane.bin";
  fs::create_directories(cfg.output_dir);
  save_snapshot(path, plane);
  const auto& s = plane.stats();
  std::printf("cm %zux%zu filter %zu arrays bloom %zu bits\n", pc.cm_rows, pc.cm_width, pc.filter_arrays, pc.bloom_bits);
  std::printf("items %llu keys %zu light mass %llu evictions %llu -> %s\n", static_cast<unsigned long long>(s.items),
              plane.recorded_keys().size(), static_cast<unsigned long long>(s.cm_mass),
              static_cast<unsigned long long>(s.evictions), path.c_str());
  return kExitOk;
}

int cmd_refine(const Common& c, const std::string& plane_path, std::size_t steps, bool no_accept) {
  auto cfg = load(c, false);
  EmConfig em = cfg.refine;
  if (steps) em.steps = steps;
  if (no_accept) em.accept_if_improves = false;
  const auto plane = load_snapshot(plane_path);
  const auto op = plane_operator(plane);
  const auto b = plane.cm().flatten();
  auto res = em_refine(op, b, em_initial(op, b), em);
  for (std::size_t i = 0; i < res.f.size(); ++i) res.f[i] += plane.filter_query(plane.recorded_keys()[i]);
  const auto path = cfg.output_dir / "refined.csv";
  write_estimates(path, plane.recorded_keys(), res.f);
  std::printf("accepted %zu of %zu steps, L1 residual %.6g -> %.6g, wrote %s\n", res.accepted, em.steps,
              res.residuals.front(), res.residuals.back(), path.c_str());
  return kExitOk;
}

int cmd_train(const Common& c, const std::string& budget_flag, bool perfect) {
  auto cfg = load(c, true);
  const auto work = load_workload(cfg);
  const auto pc = plane_config(cfg, pick_budget(cfg, budget_flag), work.universe.size());
  const auto run = summarize(work, pc, cfg.flore.snapshot_interval, cfg.flore.window);
  auto fit = fit_flore(run, cfg.flore, perfect ? TargetSource::kTruth : TargetSource::kEm, cfg.refine);
  fs::create_directories(cfg.output_dir);
  save_snapshot(cfg.output_dir / "plane.bin", run.plane);
  save_checkpoint(cfg.output_dir / "model.ckpt", fit.model);
  std::vector<CurvePoint> curve;
  for (std::size_t i = 0; i < fit.history.epochs.size(); ++i)
    curve.push_back({cfg.name, perfect ? "flore-perfect" : "flore", pc.cm_size() * 4, i, fit.history.epochs[i]});
  append_curves(cfg.output_dir / "curves.csv", curve);
  const auto& last = fit.history.epochs.back();
  std::printf("trained on %zu snapshots, %zu parameters, final loss %.6g (con %.6g)%s\n", fit.samples,
              fit.model.parameter_count(), last.total, last.con, fit.history.diverged ? " DIVERGED" : "");
  return fit.history.diverged ? kExitRuntime : kExitOk;
}

int cmd_recover(const Common& c, const std::string& plane_path, const std::string& model_path) {
  auto cfg = load(c, false);
  const auto plane = load_snapshot(plane_path);
  const auto model = load_checkpoint(model_path);
  const auto res = recover(plane, model, cfg.seeds.recovery);
  const auto path = cfg.output_dir / "recovered.csv";
  write_estimates(path, res.keys, res.estimate);
  std::printf("recovered %zu keys, consistency %.6g, wrote %s\n", res.keys.size(), consistency(plane, res),
              path.c_str());
  return kExitOk;
}

int cmd_evaluate(const Common& c) {
  auto cfg = load(c, true);
  const auto report = run_experiment(cfg);
  write_report(cfg, report);
  print_rows(report.rows);
  return report.failures() ? kExitRuntime : kExitOk;
}

int cmd_rip(const Common& c) {
  auto cfg = load(c, false);
  const auto rows = rip_bench(cfg.rip, cfg.seeds.rip);
  const auto path = cfg.output_dir / "rip.csv";
  append_rip(path, rows);
  for (const auto& r : rows) std::printf("%-3s m=%zu N=%zu s=%zu distance %.6f\n", r.kind.c_str(), r.m, r.n, r.s, r.distance);
  return kExitOk;
}

int cmd_ablate(const Common& c, std::vector<std::string> variants) {
  auto cfg = load(c, true);
  if (variants.empty()) variants = cfg.ablation.variants;
  const auto res = ablate(cfg, variants);
  append_metrics(cfg.output_dir / "ablation.csv", res.report.rows);
  append_curves(cfg.output_dir / "ablation_curves.csv", res.report.curves);
  append_cdf(cfg.output_dir / "ablation_cdf.csv", cfg.name, res.cdf);
  for (const auto& vc : res.configs) {
    std::string file = vc.name;
    for (auto& ch : file)
      if (ch == '/') ch = '_';
    std::ofstream(cfg.output_dir / (file + ".config.json")) << config_json(vc) << '\n';
  }
  print_rows(res.report.rows);
  return res.report.failures() ? kExitRuntime : kExitOk;
}

int cmd_robustness(const Common& c, std::vector<std::string> scenarios, const std::vector<double>& factors) {
  auto cfg = load(c, true);
  if (scenarios.empty()) scenarios = {"temporal", "natural", "spatial"};
  std::vector<RobustnessRow> all;
  for (const auto& name : scenarios) {
    const auto s = parse_scenario(name);
    auto f = factors;
    if (f.empty())
      f = s == Scenario::kTemporal ? cfg.robustness.temporal
          : s == Scenario::kNatural ? cfg.robustness.natural
                                    : cfg.robustness.spatial;
    auto rows = robustness(cfg, s, f);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  append_robustness(cfg.output_dir / "robustness.csv", cfg.name, all);
  std::fputs(format_robustness(all).c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flore: sketch summaries, linear/EM refinement and generative frequency recovery"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> seed_opts;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("-c,--config", common.config, "experiment YAML");
    if (config_required) opt->required();
    seed_opts.push_back(sub->add_option("--seed", seed, "override the master seed"));
    sub->add_option("-o,--out", common.out, "output directory (overrides output_dir)");
  };

  std::string budget, plane_path, model_path;
  std::size_t steps = 0;
  bool no_accept = false, perfect = false;
  std::vector<std::string> variants, scenarios;
  std::vector<double> factors;

  auto* gen = app.add_subcommand("generate", "write the configured synthetic trace");
  add_common(gen, true);
  auto* sum = app.add_subcommand("summarize", "replay the trace into a data plane and save it");
  add_common(sum, true);
  sum->add_option("--budget", budget, "memory budget, e.g. 64KB");
  auto* ref = app.add_subcommand("refine", "EM-refine a saved plane's Count-Min estimates");
  add_common(ref, false);
  ref->add_option("--plane", plane_path, "plane snapshot")->required();
  ref->add_option("-T,--steps", steps, "EM steps");
  ref->add_flag("--no-accept", no_accept, "keep every step even if the residual grows");
  auto* trn = app.add_subcommand("train", "summarize, then train a recovery model");
  add_common(trn, true);
  trn->add_option("--budget", budget, "memory budget, e.g. 64KB");
  trn->add_flag("--perfect", perfect, "train on true light-part frequencies");
  auto* rec = app.add_subcommand("recover", "run a trained model on a saved plane");
  add_common(rec, false);
  rec->add_option("--plane", plane_path, "plane snapshot")->required();
  rec->add_option("--model", model_path, "model checkpoint")->required();
  auto* ev = app.add_subcommand("evaluate", "run every estimator at every budget");
  add_common(ev, true);
  auto* rip = app.add_subcommand("rip-bench", "sampled RIP distance of sensing matrices");
  add_common(rip, false);
  auto* abl = app.add_subcommand("ablate", "loss-term ablation on the first budget");
  add_common(abl, true);
  abl->add_option("--variant", variants, "naive, no-sp, no-ort, no-rec, no-con, full");
  auto* rob = app.add_subcommand("robustness", "ARE decline under temporal, natural and spatial shift");
  add_common(rob, true);
  rob->add_option("--scenario", scenarios, "temporal, natural, spatial");
  rob->add_option("--factor", factors, "factors to evaluate (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (auto* opt : seed_opts)
    if (opt->count()) common.seed = seed;

  try {
    if (*gen) return cmd_generate(common);
    if (*sum) return cmd_summarize(common, budget);
    if (*ref) return cmd_refine(common, plane_path, steps, no_accept);
    if (*trn) return cmd_train(common, budget, perfect);
    if (*rec) return cmd_recover(common, plane_path, model_path);
    if (*ev) return cmd_evaluate(common);
    if (*rip) return cmd_rip(common);
    if (*abl) return cmd_ablate(common, variants);
    if (*rob) return cmd_robustness(common, scenarios, factors);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
