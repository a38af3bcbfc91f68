#include "flore/gen/autodiff.hpp"

#include <cmath>

#include "flore/error.hpp"
#include "flore/linsys/sketch_operator.hpp"

namespace flore::ad {

Parameter& ParameterStore::add(std::string name, ParamGroup group, Mat value) {
  Parameter& p = params_.emplace_back();
  p.name = std::move(name);
  p.group = group;
  p.grad = Mat::Zero(value.rows(), value.cols());
  p.value = std::move(value);
  return p;
}

std::size_t ParameterStore::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

Var Tape::constant(Mat value) {
  nodes_.push_back({std::move(value), {}, false, nullptr, {}});
  return {static_cast<int>(nodes_.size() - 1)};
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back({p.value, {}, record_, record_ ? &p : nullptr, {}});
  return {static_cast<int>(nodes_.size() - 1)};
}

Mat& Tape::grad(Var v) {
  Node& n = nodes_[static_cast<std::size_t>(v.id)];
  if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Tape::push(Mat value, std::initializer_list<Var> inputs, std::function<void(const Mat&)> back) {
  bool needs = false;
  if (record_)
    for (Var in : inputs) needs = needs || nodes_[static_cast<std::size_t>(in.id)].needs_grad;
  nodes_.push_back({std::move(value), {}, needs, nullptr, needs ? std::move(back) : nullptr});
  return {static_cast<int>(nodes_.size() - 1)};
}

void Tape::backward(Var root) {
  if (!record_) throw CapabilityError("backward on a non-recording tape");
  if (value(root).size() != 1) throw ShapeError("backward root must be a scalar");
  grad(root)(0, 0) = 1.0;
  for (std::size_t i = static_cast<std::size_t>(root.id) + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.param) n.param->grad += n.grad;
    if (n.back) {
      const Mat g = std::move(n.grad);
      n.grad.resize(0, 0);
      n.back(g);
    }
  }
}

namespace {

void require_same(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                     ")");
}

}  // namespace

Var add(Tape& t, Var a, Var b) {
  const Mat& va = t.value(a);
  const Mat& vb = t.value(b);
  if (vb.rows() == 1 && va.rows() != 1 && vb.cols() == va.cols()) {
    Mat out = va.rowwise() + vb.row(0);
    return t.push(std::move(out), {a, b}, [&t, a, b](const Mat& g) {
      if (t.needs_grad(a)) t.grad(a) += g;
      if (t.needs_grad(b)) t.grad(b) += g.colwise().sum();
    });
  }
  require_same(va, vb, "add");
  return t.push(va + vb, {a, b}, [&t, a, b](const Mat& g) {
    if (t.needs_grad(a)) t.grad(a) += g;
    if (t.needs_grad(b)) t.grad(b) += g;
  });
}

Var sub(Tape& t, Var a, Var b) {
  require_same(t.value(a), t.value(b), "sub");
  return t.push(t.value(a) - t.value(b), {a, b}, [&t, a, b](const Mat& g) {
    if (t.needs_grad(a)) t.grad(a) += g;
    if (t.needs_grad(b)) t.grad(b) -= g;
  });
}

Var mul(Tape& t, Var a, Var b) {
  require_same(t.value(a), t.value(b), "mul");
  return t.push(t.value(a).cwiseProduct(t.value(b)), {a, b}, [&t, a, b](const Mat& g) {
    if (t.needs_grad(a)) t.grad(a) += g.cwiseProduct(t.value(b));
    if (t.needs_grad(b)) t.grad(b) += g.cwiseProduct(t.value(a));
  });
}

Var scale(Tape& t, Var a, double s) {
  return t.push(s * t.value(a), {a}, [&t, a, s](const Mat& g) { t.grad(a) += s * g; });
}

Var matmul(Tape& t, Var a, Var b) {
  if (t.value(a).cols() != t.value(b).rows()) throw ShapeError("matmul: inner dimensions differ");
  return t.push(t.value(a) * t.value(b), {a, b}, [&t, a, b](const Mat& g) {
    if (t.needs_grad(a)) t.grad(a).noalias() += g * t.value(b).transpose();
    if (t.needs_grad(b)) t.grad(b).noalias() += t.value(a).transpose() * g;
  });
}

Var linear(Tape& t, Var x, Var w, Var bias) { return add(t, matmul(t, x, w), bias); }

Var relu(Tape& t, Var a) {
  return t.push(t.value(a).cwiseMax(0.0), {a}, [&t, a](const Mat& g) {
    t.grad(a) += (t.value(a).array() > 0.0).cast<double>().matrix().cwiseProduct(g);
  });
}

Var tanh(Tape& t, Var a) {
  Mat out = t.value(a).array().tanh().matrix();
  Tape* tp = &t;
  const int next = static_cast<int>(t.size());
  return t.push(std::move(out), {a}, [tp, a, next](const Mat& g) {
    tp->grad(a) += g.cwiseProduct((1.0 - tp->value(Var{next}).array().square()).matrix());
  });
}

Var exp(Tape& t, Var a) {
  Mat out = t.value(a).array().exp().matrix();
  Tape* tp = &t;
  const int next = static_cast<int>(t.size());
  return t.push(std::move(out), {a}, [tp, a, next](const Mat& g) {
    tp->grad(a) += g.cwiseProduct(tp->value(Var{next}));
  });
}

Var neg_exp(Tape& t, Var a) {
  Mat out = (-t.value(a).array()).exp().matrix();
  Tape* tp = &t;
  const int next = static_cast<int>(t.size());
  return t.push(std::move(out), {a}, [tp, a, next](const Mat& g) {
    tp->grad(a) -= g.cwiseProduct(tp->value(Var{next}));
  });
}

Var soft_clamp(Tape& t, Var a, double c) {
  Mat out = (c * (t.value(a).array() / c).tanh()).matrix();
  Tape* tp = &t;
  const int next = static_cast<int>(t.size());
  return t.push(std::move(out), {a}, [tp, a, next, c](const Mat& g) {
    const auto y = tp->value(Var{next}).array() / c;
    tp->grad(a) += g.cwiseProduct((1.0 - y.square()).matrix());
  });
}

Var concat_cols(Tape& t, Var a, Var b) {
  const Mat& va = t.value(a);
  const Mat& vb = t.value(b);
  if (va.rows() != vb.rows()) throw ShapeError("concat_cols: row counts differ");
  Mat out(va.rows(), va.cols() + vb.cols());
  out << va, vb;
  const Eigen::Index ca = va.cols(), cb = vb.cols();
  return t.push(std::move(out), {a, b}, [&t, a, b, ca, cb](const Mat& g) {
    if (t.needs_grad(a)) t.grad(a) += g.leftCols(ca);
    if (t.needs_grad(b)) t.grad(b) += g.rightCols(cb);
  });
}

Var slice_cols(Tape& t, Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > t.value(a).cols()) throw ShapeError("slice_cols: out of range");
  return t.push(t.value(a).middleCols(start, count), {a},
                [&t, a, start, count](const Mat& g) { t.grad(a).middleCols(start, count) += g; });
}

Var permute_cols(Tape& t, Var a, std::span<const Eigen::Index> perm) {
  const Mat& va = t.value(a);
  if (static_cast<Eigen::Index>(perm.size()) != va.cols()) throw ShapeError("permute_cols: permutation size");
  Mat out(va.rows(), va.cols());
  for (Eigen::Index j = 0; j < va.cols(); ++j) out.col(j) = va.col(perm[static_cast<std::size_t>(j)]);
  std::vector<Eigen::Index> p(perm.begin(), perm.end());
  return t.push(std::move(out), {a}, [&t, a, p = std::move(p)](const Mat& g) {
    Mat& ga = t.grad(a);
    for (std::size_t j = 0; j < p.size(); ++j) ga.col(p[j]) += g.col(static_cast<Eigen::Index>(j));
  });
}

Var repeat_rows(Tape& t, Var a, Eigen::Index times) {
  const Mat& va = t.value(a);
  if (times == 1) return a;
  Mat out(va.rows() * times, va.cols());
  for (Eigen::Index i = 0; i < va.rows(); ++i)
    for (Eigen::Index s = 0; s < times; ++s) out.row(i * times + s) = va.row(i);
  return t.push(std::move(out), {a}, [&t, a, times](const Mat& g) {
    Mat& ga = t.grad(a);
    for (Eigen::Index i = 0; i < ga.rows(); ++i)
      for (Eigen::Index s = 0; s < times; ++s) ga.row(i) += g.row(i * times + s);
  });
}

Var rows_to_cols(Tape& t, Var a, Eigen::Index group) {
  const Mat& va = t.value(a);
  if (group == 1) return a;
  if (va.rows() % group != 0) throw ShapeError("rows_to_cols: rows not divisible by group");
  const Eigen::Index n = va.cols();
  const Eigen::Index batch = va.rows() / group;
  Mat out(batch, group * n);
  for (Eigen::Index b = 0; b < batch; ++b)
    for (Eigen::Index s = 0; s < group; ++s) out.block(b, s * n, 1, n) = va.row(b * group + s);
  return t.push(std::move(out), {a}, [&t, a, group, n, batch](const Mat& g) {
    Mat& ga = t.grad(a);
    for (Eigen::Index b = 0; b < batch; ++b)
      for (Eigen::Index s = 0; s < group; ++s) ga.row(b * group + s) += g.block(b, s * n, 1, n);
  });
}

Var cols_to_rows(Tape& t, Var a, Eigen::Index group) {
  const Mat& va = t.value(a);
  if (group == 1) return a;
  if (va.cols() % group != 0) throw ShapeError("cols_to_rows: columns not divisible by group");
  const Eigen::Index n = va.cols() / group;
  const Eigen::Index batch = va.rows();
  Mat out(batch * group, n);
  for (Eigen::Index b = 0; b < batch; ++b)
    for (Eigen::Index s = 0; s < group; ++s) out.row(b * group + s) = va.block(b, s * n, 1, n);
  return t.push(std::move(out), {a}, [&t, a, group, n, batch](const Mat& g) {
    Mat& ga = t.grad(a);
    for (Eigen::Index b = 0; b < batch; ++b)
      for (Eigen::Index s = 0; s < group; ++s) ga.block(b, s * n, 1, n) += g.row(b * group + s);
  });
}

Var resize_cols(Tape& t, Var a, Eigen::Index cols) {
  const Mat& va = t.value(a);
  if (cols == va.cols()) return a;
  if (cols < va.cols()) return slice_cols(t, a, 0, cols);
  Mat out = Mat::Zero(va.rows(), cols);
  const Eigen::Index keep = va.cols();
  out.leftCols(keep) = va;
  return t.push(std::move(out), {a}, [&t, a, keep](const Mat& g) { t.grad(a) += g.leftCols(keep); });
}

Var sketch_apply(Tape& t, Var a, const SketchOperator& op, double phi_scale) {
  const Mat& va = t.value(a);
  const auto n = static_cast<Eigen::Index>(op.cols());
  const auto m = static_cast<Eigen::Index>(op.rows());
  if (va.cols() != n) throw ShapeError("sketch_apply: column count must equal operator columns");
  Mat out = Mat::Zero(va.rows(), m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t r = 0; r < op.bands(); ++r)
      out.col(static_cast<Eigen::Index>(op.row_of(static_cast<std::size_t>(i), r))) +=
          (phi_scale * op.value_of(static_cast<std::size_t>(i), r)) * va.col(i);
  const SketchOperator* opp = &op;
  return t.push(std::move(out), {a}, [&t, a, opp, phi_scale, n](const Mat& g) {
    Mat& ga = t.grad(a);
    for (Eigen::Index i = 0; i < n; ++i)
      for (std::size_t r = 0; r < opp->bands(); ++r)
        ga.col(i) += (phi_scale * opp->value_of(static_cast<std::size_t>(i), r)) *
                     g.col(static_cast<Eigen::Index>(opp->row_of(static_cast<std::size_t>(i), r)));
  });
}

Var mean_square(Tape& t, Var a) {
  const Mat& va = t.value(a);
  const double n = static_cast<double>(va.size());
  Mat out(1, 1);
  out(0, 0) = va.squaredNorm() / n;
  return t.push(std::move(out), {a}, [&t, a, n](const Mat& g) { t.grad(a) += (2.0 * g(0, 0) / n) * t.value(a); });
}

Var mean_abs(Tape& t, Var a) {
  const Mat& va = t.value(a);
  const double n = static_cast<double>(va.size());
  Mat out(1, 1);
  out(0, 0) = va.cwiseAbs().sum() / n;
  return t.push(std::move(out), {a}, [&t, a, n](const Mat& g) {
    t.grad(a) += (g(0, 0) / n) * t.value(a).unaryExpr([](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
  });
}

Var weighted_sum(Tape& t, std::span<const Var> terms, std::span<const double> weights) {
  if (terms.size() != weights.size() || terms.empty()) throw ShapeError("weighted_sum: terms and weights differ");
  Var acc = t.constant(Mat::Zero(1, 1));
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Var term = terms[i];
    const double w = weights[i];
    if (t.value(term).size() != 1) throw ShapeError("weighted_sum: terms must be scalars");
    const Var prev = acc;
    Mat v(1, 1);
    v(0, 0) = t.value(prev)(0, 0) + w * t.value(term)(0, 0);
    acc = t.push(std::move(v), {prev, term}, [&t, prev, term, w](const Mat& g) {
      if (t.needs_grad(prev)) t.grad(prev) += g;
      if (t.needs_grad(term)) t.grad(term) += w * g;
    });
  }
  return acc;
}

}  // namespace flore::ad
