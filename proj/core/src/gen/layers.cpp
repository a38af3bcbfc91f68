#include "flore/gen/layers.hpp"

#include <cmath>
#include <numeric>

#include "flore/error.hpp"

namespace flore {

using ad::Var;

Linear Linear::create(ad::ParameterStore& store, const std::string& name, ad::ParamGroup group, std::size_t in,
                      std::size_t out, Rng& rng, double gain) {
  Linear l;
  l.in = in;
  l.out = out;
  const double limit = gain * std::sqrt(6.0 / static_cast<double>(in + out));
  ad::Mat w(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-limit, limit);
  l.w = store.all().size();
  store.add(name + ".w", group, std::move(w));
  l.b = store.all().size();
  store.add(name + ".b", group, ad::Mat::Zero(1, static_cast<Eigen::Index>(out)));
  return l;
}

Var Linear::forward(ad::Tape& t, ad::ParameterStore& store, Var x) const {
  return ad::linear(t, x, t.parameter(store.all()[w]), t.parameter(store.all()[b]));
}

SubNet SubNet::create(ad::ParameterStore& store, const std::string& name, std::size_t in, std::size_t width,
                      std::size_t out, Rng& rng, double output_gain) {
  return {Linear::create(store, name + ".0", ad::ParamGroup::kFlow, in, width, rng),
          Linear::create(store, name + ".1", ad::ParamGroup::kFlow, width, out, rng, output_gain)};
}

Var SubNet::forward(ad::Tape& t, ad::ParameterStore& store, Var x) const {
  return output.forward(t, store, ad::relu(t, hidden.forward(t, store, x)));
}

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::kAffine: return "affine";
    case CouplingKind::kAdditive: return "additive";
    case CouplingKind::kNone: return "none";
  }
  return "unknown";
}

CouplingKind parse_coupling(const std::string& name) {
  if (name == "affine") return CouplingKind::kAffine;
  if (name == "additive") return CouplingKind::kAdditive;
  if (name == "none") return CouplingKind::kNone;
  throw ConfigError("unknown coupling kind '" + name + "'");
}

CouplingBlock CouplingBlock::create(ad::ParameterStore& store, const std::string& name, CouplingKind kind,
                                    std::size_t dim, std::size_t hidden, std::size_t cond, double clamp, Rng& rng) {
  CouplingBlock blk;
  blk.kind = kind;
  blk.d1 = dim / 2;
  blk.d2 = dim - blk.d1;
  blk.cond = cond;
  blk.clamp = clamp;
  if (kind == CouplingKind::kNone) return blk;
  constexpr double kOutputGain = 0.1;
  if (kind == CouplingKind::kAffine) blk.s1 = SubNet::create(store, name + ".s1", blk.d2 + cond, hidden, blk.d1, rng, kOutputGain);
  blk.t1 = SubNet::create(store, name + ".t1", blk.d2 + cond, hidden, blk.d1, rng, kOutputGain);
  if (kind == CouplingKind::kAffine) blk.s2 = SubNet::create(store, name + ".s2", blk.d1 + cond, hidden, blk.d2, rng, kOutputGain);
  blk.t2 = SubNet::create(store, name + ".t2", blk.d1 + cond, hidden, blk.d2, rng, kOutputGain);
  return blk;
}

std::size_t CouplingBlock::count(CouplingKind kind, std::size_t dim, std::size_t hidden, std::size_t cond) {
  if (kind == CouplingKind::kNone) return 0;
  const std::size_t d1 = dim / 2, d2 = dim - d1;
  const std::size_t per_side = kind == CouplingKind::kAffine ? 2 : 1;
  return per_side * (SubNet::count(d2 + cond, hidden, d1) + SubNet::count(d1 + cond, hidden, d2));
}

namespace {

Var with_cond(ad::Tape& t, Var x, Var c) { return c.id < 0 ? x : ad::concat_cols(t, x, c); }

}  // namespace

Var CouplingBlock::forward(ad::Tape& t, ad::ParameterStore& store, Var u, Var c) const {
  if (kind == CouplingKind::kNone) return u;
  const auto i1 = static_cast<Eigen::Index>(d1), i2 = static_cast<Eigen::Index>(d2);
  Var u1 = ad::slice_cols(t, u, 0, i1);
  Var u2 = ad::slice_cols(t, u, i1, i2);
  Var in2 = with_cond(t, u2, c);
  Var v1 = u1;
  if (kind == CouplingKind::kAffine) v1 = ad::mul(t, u1, ad::exp(t, ad::soft_clamp(t, s1.forward(t, store, in2), clamp)));
  v1 = ad::add(t, v1, t1.forward(t, store, in2));
  Var in1 = with_cond(t, v1, c);
  Var v2 = u2;
  if (kind == CouplingKind::kAffine) v2 = ad::mul(t, u2, ad::exp(t, ad::soft_clamp(t, s2.forward(t, store, in1), clamp)));
  v2 = ad::add(t, v2, t2.forward(t, store, in1));
  return ad::concat_cols(t, v1, v2);
}

Var CouplingBlock::inverse(ad::Tape& t, ad::ParameterStore& store, Var v, Var c) const {
  if (kind == CouplingKind::kNone) return v;
  const auto i1 = static_cast<Eigen::Index>(d1), i2 = static_cast<Eigen::Index>(d2);
  Var v1 = ad::slice_cols(t, v, 0, i1);
  Var v2 = ad::slice_cols(t, v, i1, i2);
  Var in1 = with_cond(t, v1, c);
  Var u2 = ad::sub(t, v2, t2.forward(t, store, in1));
  if (kind == CouplingKind::kAffine)
    u2 = ad::mul(t, u2, ad::neg_exp(t, ad::soft_clamp(t, s2.forward(t, store, in1), clamp)));
  Var in2 = with_cond(t, u2, c);
  Var u1 = ad::sub(t, v1, t1.forward(t, store, in2));
  if (kind == CouplingKind::kAffine)
    u1 = ad::mul(t, u1, ad::neg_exp(t, ad::soft_clamp(t, s1.forward(t, store, in2), clamp)));
  return ad::concat_cols(t, u1, u2);
}

Permutation Permutation::create(std::size_t dim, std::uint64_t seed) {
  Permutation p;
  p.forward_map.resize(dim);
  std::iota(p.forward_map.begin(), p.forward_map.end(), Eigen::Index{0});
  Rng rng(seed);
  rng.shuffle(std::span<Eigen::Index>(p.forward_map));
  p.inverse_map.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) p.inverse_map[static_cast<std::size_t>(p.forward_map[j])] = static_cast<Eigen::Index>(j);
  return p;
}

}  // namespace flore
