#include "flore/eval/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>

#include "flore/em/em_refine.hpp"
#include "flore/error.hpp"
#include "flore/eval/pipeline.hpp"
#include "flore/linsys/lsqr.hpp"
#include "flore/linsys/omp.hpp"
#include "flore/sketch/augmented_sketch.hpp"
#include "flore/sketch/count_sketch.hpp"
#include "flore/sketch/hash.hpp"

namespace flore::eval {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Median wall time per item over `passes` runs of `replay`.
double median_ns_per_item(std::size_t passes, std::size_t items, const std::function<void()>& replay) {
  if (passes == 0 || items == 0) return 0.0;
  std::vector<double> ns;
  for (std::size_t p = 0; p < passes; ++p) {
    const auto t0 = Clock::now();
    replay();
    ns.push_back(std::chrono::duration<double, std::nano>(Clock::now() - t0).count() / static_cast<double>(items));
  }
  std::sort(ns.begin(), ns.end());
  return ns[ns.size() / 2];
}

struct BudgetContext {
  const ExperimentConfig& config;
  const Workload& work;
  std::vector<std::uint64_t> item_hashes;
  std::vector<std::uint64_t> universe_hashes;
};

struct Cell {
  FrequencyVector estimate;
  double consistency = 0.0;
  double summary_ns = 0.0;
  double recovery_ms = 0.0;
  double train_ms = 0.0;
  std::vector<LossTerms> curve;
};

std::size_t baseline_counters(const BudgetContext& ctx, std::size_t budget) {
  const auto& cfg = ctx.config;
  if (cfg.baselines.memory == BaselineMemory::kPlaneCm)
    return plane_config(cfg, budget, ctx.work.universe.size()).cm_size();
  return budget / 4;
}

HashFamily baseline_hash(const BudgetContext& ctx, std::size_t counters) {
  const std::size_t rows = ctx.config.plane.cm_rows;
  const std::size_t width = counters / rows;
  if (width == 0) throw ConfigError("budget too small for a " + std::to_string(rows) + "-row baseline sketch");
  DataPlaneConfig probe;
  probe.seed = ctx.config.seeds.plane;
  return HashFamily(rows, width, probe.cm_seed());
}

CountMin build_cm(const BudgetContext& ctx, const HashFamily& hash, bool conservative) {
  CountMin cm(hash);
  const auto& items = ctx.work.trace.items;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (conservative) cm.update_conservative(ctx.item_hashes[i], items[i].value);
    else cm.update(ctx.item_hashes[i], items[i].value);
  }
  return cm;
}

Cell run_sketch(const BudgetContext& ctx, Estimator e, std::size_t budget) {
  Cell cell;
  const auto& cfg = ctx.config;
  const std::size_t n = ctx.work.universe.size();
  const std::size_t passes = cfg.timing_passes;
  const std::size_t items = ctx.work.trace.size();

  if (e == Estimator::kAg) {
    const std::size_t counters = baseline_counters(ctx, budget);
    const std::size_t slots = cfg.baselines.ag_slots;
    const std::size_t filter_bytes = slots * AugmentedSketch::kSlotBytes;
    if (filter_bytes >= counters * 4) throw ConfigError("augmented sketch filter does not fit the budget");
    const auto hash = baseline_hash(ctx, counters - filter_bytes / 4);
    auto build = [&] {
      AugmentedSketch ag(slots, CountMin(hash));
      for (std::size_t i = 0; i < items; ++i) ag.update(ctx.item_hashes[i], ctx.work.trace.items[i].value);
      return ag;
    };
    const auto ag = build();
    cell.summary_ns = median_ns_per_item(passes, items, [&] { build(); });
    const auto t0 = Clock::now();
    cell.estimate.resize(n);
    for (std::size_t i = 0; i < n; ++i) cell.estimate[i] = ag.query(ctx.universe_hashes[i]);
    cell.recovery_ms = elapsed_ms(t0);
    return cell;
  }

  const auto hash = baseline_hash(ctx, baseline_counters(ctx, budget));
  if (e == Estimator::kCs) {
    auto build = [&] {
      CountSketch cs(hash);
      for (std::size_t i = 0; i < items; ++i) cs.update(ctx.item_hashes[i], ctx.work.trace.items[i].value);
      return cs;
    };
    const auto cs = build();
    cell.summary_ns = median_ns_per_item(passes, items, [&] { build(); });
    const auto t0 = Clock::now();
    cell.estimate.resize(n);
    for (std::size_t i = 0; i < n; ++i) cell.estimate[i] = cs.query(ctx.universe_hashes[i]);
    cell.recovery_ms = elapsed_ms(t0);
    return cell;
  }

  const bool conservative = e == Estimator::kCu;
  const auto cm = build_cm(ctx, hash, conservative);
  cell.summary_ns = median_ns_per_item(passes, items, [&] { build_cm(ctx, hash, conservative); });

  const auto t0 = Clock::now();
  if (e == Estimator::kCm || e == Estimator::kCu) {
    cell.estimate.resize(n);
    for (std::size_t i = 0; i < n; ++i) cell.estimate[i] = cm.query(ctx.universe_hashes[i]);
    cell.recovery_ms = elapsed_ms(t0);
    return cell;
  }

  const SketchOperator op(hash, ctx.universe_hashes, OperatorMode::kCountMin);
  const auto b = cm.flatten();
  if (e == Estimator::kCmEm) {
    cell.estimate = em_refine(op, b, em_initial(op, b), cfg.refine).f;
  } else if (e == Estimator::kOmp) {
    if (op.rows() * op.cols() > cfg.solvers.dense_limit)
      throw CapabilityError("OMP needs a dense " + std::to_string(op.rows()) + " x " + std::to_string(op.cols()) +
                            " operator above the configured dense_limit");
    const std::size_t s = cfg.solvers.omp_sparsity ? cfg.solvers.omp_sparsity : std::max<std::size_t>(1, op.rows() / 4);
    const Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    const auto res = omp_solve(op, bv, std::min(s, op.rows()), cfg.solvers.omp_tol);
    cell.estimate.assign(res.x.data(), res.x.data() + res.x.size());
  } else if (e == Estimator::kLsq) {
    const Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    const auto res = lsq_solve(op, bv, cfg.solvers.lsq_iters, cfg.solvers.lsq_tol);
    cell.estimate.assign(res.x.data(), res.x.data() + res.x.size());
  } else {
    throw ParameterError("not a sketch baseline: " + to_string(e));
  }
  cell.recovery_ms = elapsed_ms(t0);
  return cell;
}

struct FloreState {
  std::optional<PlaneRun> run;
  double summary_ns = 0.0;
};

Cell run_flore(const BudgetContext& ctx, Estimator e, std::size_t budget, FloreState& state) {
  const auto& cfg = ctx.config;
  const auto pc = plane_config(cfg, budget, ctx.work.universe.size());
  if (!state.run) {
    state.run = summarize(ctx.work, pc, cfg.flore.snapshot_interval, cfg.flore.window);
    state.summary_ns = median_ns_per_item(cfg.timing_passes, ctx.work.trace.size(), [&] {
      FloreDataPlane plane(pc);
      for (const auto& item : ctx.work.trace.items) plane.insert(item.key, item.value);
    });
  }
  Cell cell;
  cell.summary_ns = state.summary_ns;
  const auto source = e == Estimator::kFlorePerfect ? TargetSource::kTruth : TargetSource::kEm;
  auto t0 = Clock::now();
  auto fit = fit_flore(*state.run, cfg.flore, source, cfg.refine);
  cell.train_ms = elapsed_ms(t0);
  cell.curve = fit.history.epochs;
  if (fit.history.diverged) throw NumericError("training diverged");

  t0 = Clock::now();
  const auto result = recover(state.run->plane, fit.model, cfg.seeds.recovery);
  cell.estimate = align_to_index(result, ctx.work.universe);
  cell.recovery_ms = elapsed_ms(t0);
  cell.consistency = consistency(state.run->plane, result);
  return cell;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunReport report;
  const Workload work = load_workload(config);
  if (work.universe.empty()) throw ParameterError("trace has no keys");
  const std::size_t hh = config.heavy_hitters ? config.heavy_hitters : default_heavy_hitter_count(work.universe.size());

  BudgetContext ctx{config, work, {}, {}};
  ctx.item_hashes.reserve(work.trace.size());
  for (const auto& item : work.trace.items) ctx.item_hashes.push_back(key_hash(item.key));
  for (const auto& key : work.universe.keys()) ctx.universe_hashes.push_back(key_hash(key));

  for (std::size_t budget : config.plane.budgets) {
    FloreState flore_state;
    for (Estimator e : config.estimators) {
      ReportRow row;
      row.run = config.name;
      row.estimator = to_string(e);
      row.budget = budget;
      row.seeds = config.seeds;
      try {
        Cell cell = is_flore(e) ? run_flore(ctx, e, budget, flore_state) : run_sketch(ctx, e, budget);
        row.metrics = compute_metrics(cell.estimate, work.truth, hh);
        row.consistency = cell.consistency;
        row.summary_ns_per_item = cell.summary_ns;
        row.recovery_ms = cell.recovery_ms;
        row.train_ms = cell.train_ms;
        for (std::size_t i = 0; i < cell.curve.size(); ++i)
          report.curves.push_back({config.name, row.estimator, budget, i, cell.curve[i]});
      } catch (const std::exception& ex) {
        row.ok = false;
        row.error = ex.what();
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_report(const ExperimentConfig& config, const RunReport& report) {
  const auto& dir = config.output_dir;
  append_metrics(dir / "metrics.csv", report.rows);
  append_curves(dir / "curves.csv", report.curves);
  write_manifest(dir / (config.name + "-" + std::to_string(config.seeds.master) + ".json"), config, report);
}

}  // namespace flore::eval
