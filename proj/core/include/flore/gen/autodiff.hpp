#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flore {
class SketchOperator;
}

namespace flore::ad {

using Mat = Eigen::MatrixXd;

enum class ParamGroup : std::uint8_t { kEncoderB, kEncoderF, kDecoder, kFlow, kCondition };

struct Parameter {
  std::string name;
  ParamGroup group = ParamGroup::kFlow;
  Mat value;
  Mat grad;
};

/// Owns parameters at stable addresses.
class ParameterStore {
 public:
  Parameter& add(std::string name, ParamGroup group, Mat value);
  std::deque<Parameter>& all() noexcept { return params_; }
  const std::deque<Parameter>& all() const noexcept { return params_; }
  std::size_t scalar_count() const noexcept;
  void zero_grad();

 private:
  std::deque<Parameter> params_;
};

struct Var {
  int id = -1;
};

/// Reverse-mode tape. Values are matrices with one row per sample. When
/// built with `record = false`, parameters enter as constants and no
/// backward closures are kept (inference mode).
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}

  Var constant(Mat value);
  Var parameter(Parameter& p);

  const Mat& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  bool needs_grad(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].needs_grad; }
  /// Gradient accumulator of v (allocated lazily with v's shape).
  Mat& grad(Var v);

  /// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates to parameters.
  void backward(Var root);

  /// Registers an op result; `back` runs during backward with the output's gradient.
  Var push(Mat value, std::initializer_list<Var> inputs, std::function<void(const Mat&)> back);

  bool recording() const noexcept { return record_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    Parameter* param = nullptr;
    std::function<void(const Mat&)> back;
  };
  bool record_;
  std::vector<Node> nodes_;
};

Var add(Tape& t, Var a, Var b);  // b may be a 1 x n row broadcast over a's rows
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double s);
Var matmul(Tape& t, Var a, Var b);
Var linear(Tape& t, Var x, Var w, Var bias);
Var relu(Tape& t, Var a);
Var tanh(Tape& t, Var a);
Var exp(Tape& t, Var a);
Var neg_exp(Tape& t, Var a);  // exp(-a)
/// c * tanh(a / c): smooth clamp to (-c, c).
Var soft_clamp(Tape& t, Var a, double c);
Var concat_cols(Tape& t, Var a, Var b);
Var slice_cols(Tape& t, Var a, Eigen::Index start, Eigen::Index count);
/// out[:, j] = a[:, perm[j]]
Var permute_cols(Tape& t, Var a, std::span<const Eigen::Index> perm);
/// Each row repeated `times` times consecutively.
Var repeat_rows(Tape& t, Var a, Eigen::Index times);
/// (B*S x n) -> (B x S*n): row b*S + s lands in columns [s*n, (s+1)*n).
Var rows_to_cols(Tape& t, Var a, Eigen::Index group);
Var cols_to_rows(Tape& t, Var a, Eigen::Index group);
/// Zero-pads (or truncates) columns to `cols`.
Var resize_cols(Tape& t, Var a, Eigen::Index cols);
/// Row-wise sketch: out.row(r) = phi_scale * (Φ a.row(r)^T)^T.
Var sketch_apply(Tape& t, Var a, const SketchOperator& op, double phi_scale = 1.0);
Var mean_square(Tape& t, Var a);
Var mean_abs(Tape& t, Var a);
/// Sum of scalar (1x1) terms weighted by w.
Var weighted_sum(Tape& t, std::span<const Var> terms, std::span<const double> weights);

}  // namespace flore::ad
