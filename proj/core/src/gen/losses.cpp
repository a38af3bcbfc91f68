#include "flore/gen/losses.hpp"

#include <vector>

#include "flore/error.hpp"
#include "flore/gen/mmd.hpp"

namespace flore {

using ad::Var;

void LossWeights::validate() const {
  for (double a : {rec, inv, ort, sp})
    if (!(a >= 0.0)) throw ConfigError("loss weights must be non-negative");
}

std::string to_string(Discrepancy d) { return d == Discrepancy::kMmd ? "mmd" : "kld"; }

Discrepancy parse_discrepancy(const std::string& name) {
  if (name == "mmd") return Discrepancy::kMmd;
  if (name == "kld" || name == "moment") return Discrepancy::kMoment;
  throw ConfigError("unknown discrepancy '" + name + "'");
}

Var build_objective(ad::Tape& t, const FloreModel& model, const SketchOperator& op, const LossBatch& batch,
                    const LossOptions& options, LossTerms* terms) {
  options.weights.validate();
  const auto& cfg = model.config();
  if (batch.b.cols() != static_cast<Eigen::Index>(cfg.counters) || op.rows() != cfg.counters)
    throw ShapeError("loss batch: counter width does not match the model");
  if (batch.target.cols() != static_cast<Eigen::Index>(cfg.keys) || op.cols() != cfg.keys)
    throw ShapeError("loss batch: key count does not match the model");
  if (batch.target.rows() != batch.b.rows()) throw ShapeError("loss batch: b and target row counts differ");

  const auto& w = options.weights;
  const auto& mask = options.terms;
  Var b = t.constant(batch.b);
  Var f = t.constant(batch.target);
  Var z = t.constant(batch.z);

  std::vector<Var> vars;
  std::vector<double> weights;
  LossTerms out;
  auto record = [&](Var v, double weight, double& slot) {
    slot = t.value(v)(0, 0);
    vars.push_back(v);
    weights.push_back(weight);
  };

  const bool need_f0 = mask.con || mask.ort || mask.sp;
  Var prior{-1}, f0{-1};
  if (need_f0) {
    prior = model.prior_latent(t, b, z);
    f0 = model.generate_from_latent(t, prior);
  }
  if (mask.con) record(ad::mean_square(t, ad::sub(t, ad::sketch_apply(t, f0, op), b)), 1.0, out.con);
  if (mask.rec) {
    Var bf = t.constant(t.value(ad::sketch_apply(t, f, op)));
    Var f1 = model.generate(t, bf, z);
    record(ad::mean_square(t, ad::sub(t, f1, f)), w.rec, out.rec);
  }
  if (mask.inv) {
    Var f2 = model.generate_from_latent(t, model.invert(t, f));
    record(ad::mean_square(t, ad::sub(t, f2, f)), w.inv, out.inv);
  }
  if (mask.ort) {
    Var bz = model.invert(t, f0);
    Var d = options.discrepancy == Discrepancy::kMmd ? mmd(t, prior, bz) : moment_match(t, prior, bz);
    record(d, w.ort, out.ort);
  }
  if (mask.sp) record(ad::mean_abs(t, f0), w.sp, out.sp);
  if (vars.empty()) throw ConfigError("every loss term is disabled");

  Var total = ad::weighted_sum(t, vars, weights);
  out.total = t.value(total)(0, 0);
  if (terms) *terms = out;
  return total;
}

LossTerms compute_losses(const FloreModel& model, const SketchOperator& op, const LossBatch& batch,
                         const LossOptions& options) {
  ad::Tape t(false);
  LossTerms terms;
  build_objective(t, model, op, batch, options, &terms);
  return terms;
}

LossTerms loss_gradients(const FloreModel& model, const SketchOperator& op, const LossBatch& batch,
                         const LossOptions& options) {
  ad::Tape t(true);
  LossTerms terms;
  Var total = build_objective(t, model, op, batch, options, &terms);
  model.parameters().zero_grad();
  t.backward(total);
  return terms;
}

}  // namespace flore
