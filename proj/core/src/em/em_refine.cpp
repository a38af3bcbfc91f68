#include "flore/em/em_refine.hpp"

#include <cmath>

#include "flore/error.hpp"

namespace flore {

void EmConfig::validate() const {
  if (steps == 0) throw ConfigError("EM needs at least one step");
  if (!(epsilon >= 0.0)) throw ConfigError("EM epsilon must be non-negative");
}

namespace {

void check_problem(const SketchOperator& op, std::span<const double> b, std::span<const double> f) {
  if (op.mode() != OperatorMode::kCountMin) throw ParameterError("EM requires a non-negative (Count-Min) operator");
  if (b.size() != op.rows()) throw ShapeError("EM: counter vector length does not match operator rows");
  if (f.size() != op.cols()) throw ShapeError("EM: frequency vector length does not match operator columns");
}

}  // namespace

std::vector<double> em_step(const SketchOperator& op, std::span<const double> b, std::span<const double> f,
                            double epsilon, double phi_scale) {
  check_problem(op, b, f);
  bool any = false;
  for (double v : f) {
    if (!(v >= 0.0)) throw ParameterError("EM iterate must be non-negative and finite");
    any = any || v > 0.0;
  }
  if (!any) throw ParameterError("EM iterate is identically zero");

  std::vector<double> image = op.apply(f);
  std::vector<double> ratio(b.size(), 0.0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double denom = phi_scale * image[j] + epsilon;
    if (b[j] == 0.0) continue;
    if (denom == 0.0) throw NumericError("EM: zero denominator at counter " + std::to_string(j));
    ratio[j] = b[j] / denom;
  }
  std::vector<double> next(f.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    double acc = 0.0, colsum = 0.0;
    for (std::size_t r = 0; r < op.bands(); ++r) {
      const double phi = phi_scale * op.value_of(i, r);
      acc += phi * ratio[op.row_of(i, r)];
      colsum += phi;
    }
    next[i] = f[i] / colsum * acc;
  }
  return next;
}

double l1_residual(const SketchOperator& op, std::span<const double> b, std::span<const double> f, double phi_scale) {
  check_problem(op, b, f);
  const std::vector<double> image = op.apply(f);
  double total = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) total += std::abs(phi_scale * image[j] - b[j]);
  return total;
}

EmResult em_refine(const SketchOperator& op, std::span<const double> b, std::span<const double> f0,
                   const EmConfig& config, double phi_scale) {
  config.validate();
  EmResult out;
  out.f.assign(f0.begin(), f0.end());
  double best = l1_residual(op, b, out.f, phi_scale);
  out.residuals.push_back(best);
  for (std::size_t t = 0; t < config.steps; ++t) {
    std::vector<double> next = em_step(op, b, out.f, config.epsilon, phi_scale);
    const double loss = l1_residual(op, b, next, phi_scale);
    if (config.accept_if_improves && !(loss < best)) break;
    out.f = std::move(next);
    best = loss;
    out.residuals.push_back(loss);
    ++out.accepted;
  }
  return out;
}

std::vector<double> em_initial(const SketchOperator& op, std::span<const double> b) {
  std::vector<double> f = op.cm_query(b);
  for (auto& v : f) v = std::max(v, 1.0);
  return f;
}

NormalizedProblem normalize_problem(const SketchOperator& op, std::span<const double> b, std::span<const double> f0) {
  check_problem(op, b, f0);
  NormalizedProblem p;
  for (double v : b) p.mass += v;
  if (!(p.mass > 0.0)) throw ParameterError("degenerate EM problem: counter vector sums to zero");
  p.bands = static_cast<double>(op.bands());
  p.b.resize(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) p.b[j] = b[j] / p.mass;
  p.f0.resize(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i) p.f0[i] = p.bands * f0[i] / p.mass;
  return p;
}

std::vector<double> denormalize(std::span<const double> g, const NormalizedProblem& record) {
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = g[i] * record.mass / record.bands;
  return f;
}

}  // namespace flore
