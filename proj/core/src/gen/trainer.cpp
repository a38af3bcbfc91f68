#include "flore/gen/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flore/error.hpp"
#include "flore/random.hpp"
#include "flore/sketch/count_min.hpp"

namespace flore {

using ad::Mat;

void TrainConfig::validate() const {
  if (batch == 0) throw ConfigError("batch size must be positive");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must be in [0, 1)");
  loss.weights.validate();
}

Mat sample_latent(std::size_t rows, std::size_t dz, std::uint64_t seed) {
  Rng rng(seed);
  Mat z(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dz));
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.normal();
  return z;
}

TrainingSet prepare_training_set(const SketchOperator& op, std::span<const CounterSnapshot> snapshots,
                                 TargetSource source, const EmConfig& em) {
  std::vector<const CounterSnapshot*> usable;
  for (const auto& s : snapshots) {
    if (s.counters.size() != op.rows()) throw ShapeError("snapshot counter length does not match the operator");
    if (std::any_of(s.counters.begin(), s.counters.end(), [](double v) { return v != 0.0; })) usable.push_back(&s);
  }
  TrainingSet set;
  const auto n = static_cast<Eigen::Index>(usable.size());
  set.b.resize(n, static_cast<Eigen::Index>(op.rows()));
  set.target.resize(n, static_cast<Eigen::Index>(op.cols()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& snap = *usable[static_cast<std::size_t>(i)];
    const double scale = instance_scale(snap.counters, op.bands());
    std::vector<double> target;
    if (source == TargetSource::kTruth) {
      if (snap.light_truth.size() != op.cols()) throw ShapeError("snapshot carries no matching light-part truth");
      target = snap.light_truth;
    } else {
      target = em_refine(op, snap.counters, em_initial(op, snap.counters), em).f;
    }
    for (std::size_t j = 0; j < op.rows(); ++j) set.b(i, static_cast<Eigen::Index>(j)) = snap.counters[j] / scale;
    for (std::size_t j = 0; j < op.cols(); ++j)
      set.target(i, static_cast<Eigen::Index>(j)) = std::clamp(target[j] / scale, 0.0, 1.0);
    set.scales.push_back(scale);
  }
  return set;
}

namespace {

bool selected(ad::ParamGroup g, std::span<const ad::ParamGroup> groups) {
  return groups.empty() || std::find(groups.begin(), groups.end(), g) != groups.end();
}

LossTerms& accumulate(LossTerms& acc, const LossTerms& x, double w) {
  acc.con += w * x.con;
  acc.rec += w * x.rec;
  acc.inv += w * x.inv;
  acc.ort += w * x.ort;
  acc.sp += w * x.sp;
  acc.total += w * x.total;
  return acc;
}

}  // namespace

TrainHistory train(FloreModel& model, const SketchOperator& op, const TrainingSet& data, const TrainConfig& config,
                   std::span<const ad::ParamGroup> groups) {
  config.validate();
  if (data.size() == 0) throw ParameterError("training window is empty");
  TrainHistory history;
  auto& params = model.parameters().all();
  std::vector<Mat> m1, m2;
  for (const auto& p : params) {
    m1.push_back(Mat::Zero(p.value.rows(), p.value.cols()));
    m2.push_back(Mat::Zero(p.value.rows(), p.value.cols()));
  }
  const std::size_t segments = model.config().segments();
  const std::size_t dz = model.config().d_z();
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      Rng rng(derive_seed(config.seed, epoch));
      rng.shuffle(std::span<std::size_t>(order));
    }
    std::vector<Mat> backup;
    for (const auto& p : params) backup.push_back(p.value);
    LossTerms mean;
    for (std::size_t start = 0, count = 0; start < n; start += count) {
      count = std::min(config.batch, n - start);
      // a lone trailing sample joins this batch; the MMD term needs two per side
      if (n - start - count == 1) ++count;
      LossBatch batch;
      batch.b.resize(static_cast<Eigen::Index>(count), data.b.cols());
      batch.target.resize(static_cast<Eigen::Index>(count), data.target.cols());
      batch.z.resize(static_cast<Eigen::Index>(count * segments), static_cast<Eigen::Index>(dz));
      for (std::size_t r = 0; r < count; ++r) {
        const auto src = static_cast<Eigen::Index>(order[start + r]);
        batch.b.row(static_cast<Eigen::Index>(r)) = data.b.row(src);
        batch.target.row(static_cast<Eigen::Index>(r)) = data.target.row(src);
        const std::uint64_t zseed = config.resample_z
                                        ? derive_seed(config.seed, 0x100000000ULL + epoch * n + static_cast<std::uint64_t>(src))
                                        : derive_seed(config.seed, 0x200000000ULL + static_cast<std::uint64_t>(src));
        batch.z.middleRows(static_cast<Eigen::Index>(r * segments), static_cast<Eigen::Index>(segments)) =
            sample_latent(segments, dz, zseed);
      }
      LossTerms terms = loss_gradients(model, op, batch, config.loss);
      bool finite = std::isfinite(terms.total);
      for (const auto& p : params) finite = finite && p.grad.allFinite();
      if (!finite) {
        for (std::size_t i = 0; i < params.size(); ++i) params[i].value = backup[i];
        history.diverged = true;
        return history;
      }
      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (!selected(params[i].group, groups)) continue;
        const Mat& g = params[i].grad;
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * g;
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * g.cwiseProduct(g);
        params[i].value.array() -=
            config.learning_rate * (m1[i].array() / c1) / ((m2[i].array() / c2).sqrt() + config.adam_eps);
      }
      accumulate(mean, terms, static_cast<double>(count) / static_cast<double>(n));
    }
    history.epochs.push_back(mean);
  }
  history.steps = step;
  return history;
}

TrainHistory finetune_segment(FloreModel& model, std::size_t segment, const SketchOperator& op,
                              const TrainingSet& data, const TrainConfig& config) {
  if (!model.config().conditional) throw CapabilityError("fine-tuning a segment requires a conditional model");
  const std::size_t current = model.config().segments();
  if (segment > current) throw ParameterError("segments must be appended in order");
  if (segment == current) model.add_segment();
  model.set_keys(op.cols());
  static constexpr ad::ParamGroup kShared[] = {ad::ParamGroup::kFlow, ad::ParamGroup::kCondition};
  return train(model, op, data, config, kShared);
}

}  // namespace flore
