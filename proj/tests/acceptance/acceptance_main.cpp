// Acceptance suite: criteria 1-10 at the stated tolerances, one line each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flore/em/em_refine.hpp"
#include "flore/eval/ablation.hpp"
#include "flore/eval/config.hpp"
#include "flore/eval/experiment.hpp"
#include "flore/eval/report.hpp"
#include "flore/eval/rip_bench.hpp"
#include "flore/eval/robustness.hpp"
#include "flore/gen/losses.hpp"
#include "flore/gen/mmd.hpp"
#include "flore/gen/model.hpp"
#include "flore/gen/trainer.hpp"
#include "flore/linsys/decomposition.hpp"
#include "flore/linsys/omp.hpp"
#include "flore/linsys/sketch_operator.hpp"
#include "flore/random.hpp"
#include "flore/sketch/bloom_filter.hpp"
#include "flore/sketch/count_min.hpp"
#include "flore/sketch/data_plane.hpp"
#include "flore/sketch/hash.hpp"
#include "flore/stream/generator.hpp"
#include "flore/stream/metrics.hpp"

using namespace flore;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using ad::Mat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator<<(const T& v) {
    out_ << v;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::filesystem::path toy_path() { return std::filesystem::path(FLORE_SOURCE_DIR) / "configs" / "toy.yaml"; }

std::vector<std::uint64_t> id_hashes(std::size_t n) {
  std::vector<std::uint64_t> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = key_hash(encode_id(i));
  return h;
}

Mat normal_mat(Eigen::Index rows, Eigen::Index cols, Rng& rng, double mean = 0.0) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.normal(mean, 1.0);
  return m;
}

Mat uniform_mat(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform();
  return m;
}

GeneratedStream zipf(std::size_t keys, std::uint64_t items, double alpha, std::uint64_t seed) {
  SyntheticSpec s;
  s.keys = keys;
  s.total_items = items;
  s.alpha = alpha;
  s.rng_seed = derive_seed(seed, 1);
  s.permutation_seed = derive_seed(seed, 2);
  return generate_stream(s);
}

double mean_abs_error(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

bool same_metrics(const MetricsReport& a, const MetricsReport& b) {
  return a.aae == b.aae && a.are == b.are && a.wmre == b.wmre && a.entropy_ae == b.entropy_ae && a.f1 == b.f1 &&
         a.precision == b.precision && a.recall == b.recall;
}

const eval::ReportRow* find_row(const eval::RunReport& r, const std::string& estimator) {
  for (const auto& row : r.rows)
    if (row.estimator == estimator) return &row;
  return nullptr;
}

// Shared between criteria 7, 8 and 10.
struct ToyRuns {
  eval::ExperimentConfig config;
  eval::RunReport experiment;
  eval::AblationResult ablation;
  bool have_experiment = false;
  bool have_ablation = false;
};

ToyRuns& toy() {
  static ToyRuns runs{eval::load_config(toy_path()), {}, {}, false, false};
  return runs;
}

Outcome decomposition_exactness() {
  const SketchOperator op(HashFamily(4, 16, 101), id_hashes(256));
  const RangeNullProjector proj(op);
  const MatrixXd phi = op.materialize();
  Rng rng(1);
  double worst_null = 0, worst_cross = 0, worst_sum = 0;
  bool ok = true;
  for (int t = 0; t < 100; ++t) {
    VectorXd f(256);
    for (auto& v : f) v = rng.normal();
    const auto d = proj.decompose(f);
    const double nf = f.norm();
    const double null_img = (phi * d.f_null).cwiseAbs().maxCoeff() / nf;
    const double cross = std::abs(d.f_range.dot(d.f_null)) / (nf * nf);
    const double sum = (d.f_range + d.f_null - f).cwiseAbs().maxCoeff();
    worst_null = std::max(worst_null, null_img);
    worst_cross = std::max(worst_cross, cross);
    worst_sum = std::max(worst_sum, sum);
    ok = ok && null_img <= 1e-8 && cross <= 1e-8 && sum <= 1e-10;
  }
  Detail d;
  d << "rank " << proj.rank() << ", max |Phi f_null|/|f| " << worst_null << ", max |<r,n>|/|f|^2 " << worst_cross
    << ", max |r+n-f| " << worst_sum;
  return {ok, d.str()};
}

Outcome rip_ordering() {
  const auto& cfg = toy().config;
  eval::RipSettings s = cfg.rip;
  s.kinds = {"GM", "CM"};
  const auto rows = eval::rip_bench(s, cfg.seeds.rip);
  const double gm = rows[0].distance, cm = rows[1].distance;
  Detail d;
  d << "m " << s.m << ", N " << s.n << ", s " << s.s << ", trials " << s.trials << ": CM " << cm << ", GM " << gm
    << ", ratio " << cm / gm << " (need >= 10, GM < 0.6)";
  return {cm >= 10 * gm && gm < 0.6, d.str()};
}

Outcome em_improvement() {
  double cm_total = 0, em_total = 0, worst = 0;
  std::size_t better = 0, monotone = 0;
  const int instances = 100;
  for (int i = 0; i < instances; ++i) {
    const auto g = zipf(1000, 100000, 1.4, 3000 + i);
    CountMin cm(4, 50, derive_seed(4000, i));
    for (const auto& it : g.trace.items) cm.update(key_hash(it.key), it.value);
    const auto op = build_operator(cm.hash(), g.index);
    const auto b = cm.flatten();
    const auto query = op.cm_query(b);
    const auto r = em_refine(op, b, em_initial(op, b), EmConfig{10, true, 1e-12});
    const double a_cm = mean_abs_error(query, g.truth), a_em = mean_abs_error(r.f, g.truth);
    cm_total += a_cm;
    em_total += a_em;
    worst = std::max(worst, a_em / a_cm);
    better += a_em <= 0.6 * a_cm;
    bool mono = true;
    for (std::size_t k = 1; k < r.residuals.size(); ++k) mono = mono && r.residuals[k] <= r.residuals[k - 1];
    monotone += mono;
  }
  Detail d;
  d << "AAE(CM+EM)/AAE(CM) " << em_total / cm_total << " over 100 instances (need <= 0.6), " << better
    << "/100 individually <= 0.6, worst " << worst << ", residuals non-increasing " << monotone << "/100";
  return {em_total <= 0.6 * cm_total && monotone == 100, d.str()};
}

Outcome sketch_invariants() {
  bool cm_ok = true, cu_ok = true, bloom_fn = true, mass_ok = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = zipf(5000, 100000, 1.1, seed);
    CountMin cm(4, 256, seed), cu(4, 256, seed);
    for (const auto& it : g.trace.items) {
      cm.update(key_hash(it.key), it.value);
      cu.update_conservative(key_hash(it.key), it.value);
    }
    for (std::uint32_t i = 0; i < g.index.size(); ++i) {
      const auto h = key_hash(g.index.key(i));
      cm_ok = cm_ok && cm.query(h) >= g.truth[i];
      cu_ok = cu_ok && cu.query(h) <= cm.query(h);
    }
    DataPlaneConfig pc;
    pc.cm_width = 128;
    pc.filter_arrays = 32;
    pc.bloom_bits = static_cast<std::size_t>(9.6 * 5000);
    pc.seed = seed;
    FloreDataPlane plane(pc);
    std::uint64_t total = 0;
    for (const auto& it : g.trace.items) {
      plane.insert(it.key, it.value);
      total += static_cast<std::uint64_t>(it.value);
    }
    std::uint64_t dedicated = 0;
    for (auto c : plane.filter().counts()) dedicated += c;
    mass_ok = mass_ok && dedicated + plane.stats().cm_mass == total;
    for (std::size_t r = 0; r < plane.cm().rows(); ++r) {
      std::uint64_t row = 0;
      for (std::size_t c = 0; c < plane.cm().width(); ++c) row += plane.cm().at(r, c);
      mass_ok = mass_ok && row == plane.stats().cm_mass;
    }
  }
  BloomFilter bf(9600, 7, 77);
  for (std::uint64_t i = 0; i < 1000; ++i) bf.insert(key_hash(encode_id(i)));
  for (std::uint64_t i = 0; i < 1000; ++i) bloom_fn = bloom_fn && bf.contains(key_hash(encode_id(i)));
  std::size_t fp = 0;
  for (std::uint64_t i = 0; i < 100000; ++i) fp += bf.contains(key_hash(encode_id(5000000 + i)));
  const double fpr = static_cast<double>(fp) / 1e5, analytic = bf.expected_fpr(1000);
  const bool fpr_ok = fpr <= 2 * analytic && fpr >= analytic / 2;
  Detail d;
  d << "CM>=truth " << cm_ok << ", CU<=CM " << cu_ok << ", bloom FN-free " << bloom_fn << ", FPR " << fpr
    << " vs analytic " << analytic << ", mass conserved " << mass_ok;
  return {cm_ok && cu_ok && bloom_fn && fpr_ok && mass_ok, d.str()};
}

Outcome operator_equivalence() {
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const auto keys = 100 + rng.below(2000);
    const auto g = zipf(keys, 5 * keys + rng.below(50000), 0.8 + rng.uniform(), seed + 100);
    CountMin cm(1 + rng.below(5), 16 + rng.below(256), seed);
    for (const auto& it : g.trace.items) cm.update(key_hash(it.key), it.value);
    const auto op = build_operator(cm.hash(), g.index);
    ok = ok && op.apply(std::span<const double>(g.truth)) == cm.flatten();
  }
  return {ok, "20 random streams, apply(Phi, truth) vs flattened counters compared with =="};
}

Outcome flow_correctness() {
  bool ok = true;
  Detail d;
  ModelConfig c;
  c.keys = 10;
  c.counters = 8;
  c.latent = 8;
  c.hidden = 5;
  c.blocks = 2;
  c.seed = 21;
  FloreModel model(c);
  Rng rng(4);
  auto roundtrip = [&](const FloreModel& m) {
    const Mat x = normal_mat(32, static_cast<Eigen::Index>(m.config().latent), rng);
    return (m.flow_inverse(m.flow_forward(x)) - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
  };
  const double rt_init = roundtrip(model);

  const SketchOperator op(HashFamily(2, 4, 5), id_hashes(c.keys));
  const LossBatch batch{uniform_mat(6, 8, rng), uniform_mat(6, 10, rng), normal_mat(6, c.d_z(), rng)};
  double worst_grad = 0;
  for (int term = 0; term < 5; ++term) {
    LossOptions opts;
    opts.terms = {term == 0, term == 1, term == 2, term == 3, term == 4};
    opts.weights = {1, 1, 1, 1};
    loss_gradients(model, op, batch, opts);
    auto& params = model.parameters().all();
    std::vector<std::pair<std::size_t, Eigen::Index>> picks;
    for (std::size_t p = 0; p < params.size(); ++p)
      for (Eigen::Index i = 0; i < params[p].value.size(); ++i) picks.emplace_back(p, i);
    Rng pick(100 + term);
    pick.shuffle(std::span(picks));
    picks.resize(50);
    VectorXd a(50), n(50);
    for (std::size_t k = 0; k < picks.size(); ++k) {
      auto [p, i] = picks[k];
      a[k] = params[p].grad(i);
      const double keep = params[p].value(i);
      params[p].value(i) = keep + 1e-6;
      const double up = compute_losses(model, op, batch, opts).total;
      params[p].value(i) = keep - 1e-6;
      const double down = compute_losses(model, op, batch, opts).total;
      params[p].value(i) = keep;
      n[k] = (up - down) / 2e-6;
    }
    const double rel = (a - n).norm() / n.norm();
    worst_grad = std::max(worst_grad, rel);
    ok = ok && rel < 1e-4;
  }

  // Train a little and check the flow again.
  TrainingSet data;
  data.b = uniform_mat(16, 8, rng);
  data.target = uniform_mat(16, 10, rng);
  data.scales.assign(16, 1.0);
  TrainConfig tc;
  tc.epochs = 20;
  tc.learning_rate = 5e-3;
  train(model, op, data, tc);
  const double rt_trained = roundtrip(model);
  ok = ok && rt_init < 1e-4 && rt_trained < 1e-4;

  const Mat x = normal_mat(64, 8, rng), y = normal_mat(64, 8, rng, 0.7);
  const bool mmd_ok = mmd(x, x) == 0.0 && std::abs(mmd(x, y) - mmd(y, x)) <= 1e-12 && mmd(x, y) > 0.0 &&
                      mmd(normal_mat(256, 8, rng), normal_mat(256, 8, rng, 5.0)) > 0.5;
  ok = ok && mmd_ok;
  d << "round trip init " << rt_init << ", trained " << rt_trained << "; worst gradient rel. error " << worst_grad
    << " over con/rec/inv/ort/sp; MMD properties " << mmd_ok;
  return {ok, d.str()};
}

Outcome end_to_end() {
  auto& runs = toy();
  auto cfg = runs.config;
  cfg.estimators = {eval::Estimator::kCm, eval::Estimator::kCmEm, eval::Estimator::kFlore};
  runs.config = cfg;
  runs.experiment = eval::run_experiment(cfg);
  runs.have_experiment = true;
  const auto* cm = find_row(runs.experiment, "cm");
  const auto* em = find_row(runs.experiment, "cm+em");
  const auto* fl = find_row(runs.experiment, "flore");
  if (!cm || !em || !fl || !cm->ok || !em->ok || !fl->ok)
    return {false, "a toy cell failed: " + (fl && !fl->ok ? fl->error : std::string("baseline"))};
  const bool a = fl->consistency <= 0.05;
  const bool b = fl->metrics.wmre < cm->metrics.wmre;
  const bool c = fl->metrics.f1 >= 0.9;
  const bool d4 = fl->metrics.aae <= em->metrics.aae;
  const bool time_ok = fl->train_ms <= 5 * 60 * 1000.0;
  Detail d;
  d << "(a) consistency " << fl->consistency << (a ? " ok" : " FAIL") << "; (b) WMRE " << fl->metrics.wmre << " vs CM "
    << cm->metrics.wmre << (b ? " ok" : " FAIL") << "; (c) F1 " << fl->metrics.f1 << (c ? " ok" : " FAIL")
    << "; (d) AAE " << fl->metrics.aae << " vs CM+EM " << em->metrics.aae << (d4 ? " ok" : " FAIL") << "; training "
    << fl->train_ms / 1000.0 << " s";
  return {a && b && c && d4 && time_ok, d.str()};
}

Outcome ablation_ordering() {
  auto& runs = toy();
  runs.ablation = eval::ablate(runs.config, {"full", "no-rec", "naive"});
  runs.have_ablation = true;
  const auto& rows = runs.ablation.report.rows;
  for (const auto& r : rows)
    if (!r.ok) return {false, r.estimator + " failed: " + r.error};
  const double full = rows[0].metrics.aae, no_rec = rows[1].metrics.aae, naive = rows[2].metrics.aae;
  Detail d;
  d << "AAE full " << full << ", no-rec " << no_rec << ", naive " << naive;
  return {full <= no_rec && no_rec <= naive, d.str()};
}

std::vector<Eigen::Index> brute_force_support(const MatrixXd& a, const VectorXd& b, std::size_t s) {
  std::vector<Eigen::Index> pick(s), best;
  double best_res = INFINITY;
  std::function<void(std::size_t, Eigen::Index)> walk = [&](std::size_t depth, Eigen::Index from) {
    if (depth == s) {
      MatrixXd sub(a.rows(), static_cast<Eigen::Index>(s));
      for (std::size_t k = 0; k < s; ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(pick[k]);
      const double res = (sub * sub.colPivHouseholderQr().solve(b) - b).norm();
      if (res < best_res) {
        best_res = res;
        best = pick;
      }
      return;
    }
    for (Eigen::Index j = from; j < a.cols(); ++j) {
      pick[depth] = j;
      walk(depth + 1, j + 1);
    }
  };
  walk(0, 0);
  return best;
}

Outcome omp_recovery() {
  Rng rng(909);
  std::size_t exact = 0, verified = 0, brute_agree = 0;
  const std::size_t total = 200;
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t n = t < 100 ? 32 : 64;
    const std::size_t s = t < 100 ? 2 + t % 2 : 4;
    const auto m = static_cast<Eigen::Index>(std::ceil(4.0 * s * std::log(double(n) / s)));
    MatrixXd a(m, static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.normal() / std::sqrt(double(m));
    std::vector<Eigen::Index> truth;
    while (truth.size() < s) {
      const auto j = static_cast<Eigen::Index>(rng.below(n));
      if (std::find(truth.begin(), truth.end(), j) == truth.end()) truth.push_back(j);
    }
    std::sort(truth.begin(), truth.end());
    VectorXd f = VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (auto j : truth) f[j] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.uniform());
    const VectorXd b = a * f;
    auto got = omp_solve(a, b, s, 1e-10).support;
    std::sort(got.begin(), got.end());
    exact += got == truth;
    if (n <= 32) {
      ++verified;
      brute_agree += brute_force_support(a, b, s) == truth;
    }
  }
  Detail d;
  d << "exact support " << exact << "/" << total << " (need >= 190); brute force confirms the planted support on "
    << brute_agree << "/" << verified << " instances with N = 32";
  return {exact * 100 >= 95 * total && brute_agree == verified, d.str()};
}

Outcome determinism() {
  auto& runs = toy();
  bool ok = true;
  Detail d;
  if (!runs.have_experiment) {
    runs.experiment = eval::run_experiment(runs.config);
    runs.have_experiment = true;
  }
  const auto again = eval::run_experiment(runs.config);
  bool exp_ok = again.rows.size() == runs.experiment.rows.size();
  for (std::size_t i = 0; exp_ok && i < again.rows.size(); ++i)
    exp_ok = same_metrics(again.rows[i].metrics, runs.experiment.rows[i].metrics) &&
             again.rows[i].consistency == runs.experiment.rows[i].consistency;
  ok = ok && exp_ok;

  bool abl_ok = true;
  if (runs.have_ablation) {
    const auto rerun = eval::ablate(runs.config, {"full"});
    abl_ok = same_metrics(rerun.report.rows[0].metrics, runs.ablation.report.rows[0].metrics);
  }
  ok = ok && abl_ok;

  const auto r1 = eval::rip_bench(runs.config.rip, runs.config.seeds.rip);
  const auto r2 = eval::rip_bench(runs.config.rip, runs.config.seeds.rip);
  bool rip_ok = r1.size() == r2.size();
  for (std::size_t i = 0; rip_ok && i < r1.size(); ++i) rip_ok = r1[i].distance == r2[i].distance;
  ok = ok && rip_ok;

  auto small = runs.config;
  small.flore.train.epochs = 20;
  const auto t1 = eval::robustness(small, eval::Scenario::kTemporal, {1.0});
  const auto t2 = eval::robustness(small, eval::Scenario::kTemporal, {1.0});
  const bool rob_ok = t1[0].are == t2[0].are && t1[0].are_base == t2[0].are_base;
  ok = ok && rob_ok;

  d << "evaluate " << exp_ok << ", ablate " << abl_ok << ", rip-bench " << rip_ok << ", robustness " << rob_ok;
  return {ok, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "decomposition exactness", 5, decomposition_exactness},
      {2, "RIP ordering", 30, rip_ordering},
      {3, "EM improvement", 60, em_improvement},
      {4, "sketch invariants", 30, sketch_invariants},
      {5, "operator/sketch equivalence", 10, operator_equivalence},
      {6, "flow correctness", 60, flow_correctness},
      {7, "end-to-end generative recovery", 0, end_to_end},
      {8, "ablation ordering", 0, ablation_ordering},
      {9, "OMP exact recovery", 0, omp_recovery},
      {10, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s == 0 || secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %-32s %s  [%.1f s%s] %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                in_time ? "" : " over limit", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
