#include "flore/gen/model.hpp"

#include "flore/error.hpp"

namespace flore {

using ad::Mat;
using ad::Var;

void ModelConfig::validate() const {
  if (keys == 0) throw ConfigError("model needs at least one key");
  if (counters == 0) throw ConfigError("model needs at least one counter");
  if (latent < 3) throw ConfigError("latent width must be at least 3 (d_b = floor(2 d_f / 3), d_z the rest)");
  if (hidden == 0) throw ConfigError("coupling subnet width must be positive");
  if (!(clamp > 0.0)) throw ConfigError("log-scale clamp must be positive");
  if (conditional) {
    if (max_segments == 0 || cond_dim == 0) throw ConfigError("conditioning needs positive capacity and width");
    if (segments() > max_segments)
      throw ConfigError("key count needs " + std::to_string(segments()) + " segments, capacity is " +
                        std::to_string(max_segments));
  } else if (segment_length != 0 && segment_length != keys) {
    throw ConfigError("segment_length requires conditioning");
  }
}

bool ModelConfig::same_architecture(const ModelConfig& o) const noexcept {
  return counters == o.counters && latent == o.latent && hidden == o.hidden && blocks == o.blocks &&
         ae_hidden == o.ae_hidden && coupling == o.coupling && clamp == o.clamp && conditional == o.conditional &&
         seg_len() == o.seg_len() && max_segments == o.max_segments && cond_dim == o.cond_dim &&
         (conditional || keys == o.keys);
}

namespace {

std::size_t mlp_count(std::size_t in, std::size_t hidden, std::size_t out) {
  return hidden ? Linear::count(in, hidden) + Linear::count(hidden, out) : Linear::count(in, out);
}

}  // namespace

std::size_t expected_parameter_count(const ModelConfig& c) {
  const std::size_t cond = c.conditional ? c.cond_dim : 0;
  std::size_t n = mlp_count(c.counters, c.ae_hidden, c.d_b()) + mlp_count(c.seg_len(), c.ae_hidden, c.latent) +
                  mlp_count(c.latent, c.ae_hidden, c.seg_len());
  n += c.blocks * CouplingBlock::count(c.coupling, c.latent, c.hidden, cond);
  if (c.conditional) n += Linear::count(c.max_segments, c.cond_dim);
  return n;
}

FloreModel::FloreModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  if (config_.conditional && config_.segment_length == 0) config_.segment_length = config_.keys;
  Rng rng(derive_seed(config_.seed, 0));
  auto mlp = [&](const std::string& name, ad::ParamGroup group, std::size_t in, std::size_t out) {
    std::vector<Linear> layers;
    if (config_.ae_hidden) {
      layers.push_back(Linear::create(params_, name + ".0", group, in, config_.ae_hidden, rng));
      layers.push_back(Linear::create(params_, name + ".1", group, config_.ae_hidden, out, rng));
    } else {
      layers.push_back(Linear::create(params_, name + ".0", group, in, out, rng));
    }
    return layers;
  };
  enc_b_ = mlp("enc_b", ad::ParamGroup::kEncoderB, config_.counters, config_.d_b());
  enc_f_ = mlp("enc_f", ad::ParamGroup::kEncoderF, config_.seg_len(), config_.latent);
  dec_ = mlp("dec", ad::ParamGroup::kDecoder, config_.latent, config_.seg_len());
  const std::size_t cond = config_.conditional ? config_.cond_dim : 0;
  if (config_.conditional)
    cond_ = Linear::create(params_, "cond", ad::ParamGroup::kCondition, config_.max_segments, config_.cond_dim, rng);
  for (std::size_t l = 0; l < config_.blocks; ++l) {
    blocks_.push_back(CouplingBlock::create(params_, "block" + std::to_string(l), config_.coupling, config_.latent,
                                            config_.hidden, cond, config_.clamp, rng));
    perms_.push_back(Permutation::create(config_.latent, derive_seed(config_.seed, 100 + l)));
  }
}

Var FloreModel::run(ad::Tape& t, const std::vector<Linear>& layers, Var x) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    x = layers[i].forward(t, params_, x);
    x = i + 1 < layers.size() ? ad::relu(t, x) : ad::tanh(t, x);
  }
  return x;
}

Var FloreModel::encode_b(ad::Tape& t, Var b) const {
  if (t.value(b).cols() != static_cast<Eigen::Index>(config_.counters)) throw ShapeError("encode_b: expected m columns");
  return run(t, enc_b_, b);
}

Var FloreModel::encode_f(ad::Tape& t, Var f) const { return run(t, enc_f_, f); }

Var FloreModel::decode(ad::Tape& t, Var latent) const { return run(t, dec_, latent); }

Var FloreModel::condition(ad::Tape& t, Eigen::Index batch) const {
  if (!config_.conditional) return Var{-1};
  const auto s = static_cast<Eigen::Index>(config_.segments());
  Mat onehot = Mat::Zero(batch * s, static_cast<Eigen::Index>(config_.max_segments));
  for (Eigen::Index r = 0; r < onehot.rows(); ++r) onehot(r, r % s) = 1.0;
  return cond_.forward(t, params_, t.constant(std::move(onehot)));
}

Var FloreModel::flow(ad::Tape& t, Var x, Var cond, bool inverse) const {
  if (t.value(x).cols() != static_cast<Eigen::Index>(config_.latent)) throw ShapeError("flow: expected d_f columns");
  if (!t.value(x).allFinite()) throw NumericError("flow: non-finite input");
  if (!inverse) {
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
      x = blocks_[l].forward(t, params_, x, cond);
      x = perms_[l].forward(t, x);
    }
  } else {
    for (std::size_t l = blocks_.size(); l-- > 0;) {
      x = perms_[l].inverse(t, x);
      x = blocks_[l].inverse(t, params_, x, cond);
    }
  }
  return x;
}

Var FloreModel::prior_latent(ad::Tape& t, Var b, Var z) const {
  const auto s = static_cast<Eigen::Index>(config_.segments());
  if (t.value(z).rows() != t.value(b).rows() * s || t.value(z).cols() != static_cast<Eigen::Index>(config_.d_z()))
    throw ShapeError("z must have B*S rows and d_z columns");
  return ad::concat_cols(t, ad::repeat_rows(t, encode_b(t, b), s), z);
}

Var FloreModel::generate(ad::Tape& t, Var b, Var z) const {
  if (!t.value(b).allFinite() || !t.value(z).allFinite()) throw NumericError("generate: non-finite input");
  return generate_from_latent(t, prior_latent(t, b, z));
}

Var FloreModel::generate_from_latent(ad::Tape& t, Var latent) const {
  const auto s = static_cast<Eigen::Index>(config_.segments());
  Var mapped = flow(t, latent, condition(t, t.value(latent).rows() / s), false);
  Var out = ad::rows_to_cols(t, decode(t, mapped), s);
  return ad::resize_cols(t, out, static_cast<Eigen::Index>(config_.keys));
}

Var FloreModel::invert(ad::Tape& t, Var f) const {
  if (t.value(f).cols() != static_cast<Eigen::Index>(config_.keys)) throw ShapeError("invert: expected N columns");
  if (!t.value(f).allFinite()) throw NumericError("invert: non-finite input");
  const auto s = static_cast<Eigen::Index>(config_.segments());
  const Eigen::Index batch = t.value(f).rows();
  Var padded = ad::resize_cols(t, f, s * static_cast<Eigen::Index>(config_.seg_len()));
  Var latent = encode_f(t, ad::cols_to_rows(t, padded, s));
  return flow(t, latent, condition(t, batch), true);
}

Mat FloreModel::generate(const Mat& b, const Mat& z) const {
  ad::Tape t(false);
  return t.value(generate(t, t.constant(b), t.constant(z)));
}

Mat FloreModel::invert(const Mat& f) const {
  ad::Tape t(false);
  return t.value(invert(t, t.constant(f)));
}

Mat FloreModel::flow_forward(const Mat& latent) const {
  ad::Tape t(false);
  const auto s = static_cast<Eigen::Index>(config_.segments());
  return t.value(flow(t, t.constant(latent), condition(t, latent.rows() / s), false));
}

Mat FloreModel::flow_inverse(const Mat& latent) const {
  ad::Tape t(false);
  const auto s = static_cast<Eigen::Index>(config_.segments());
  return t.value(flow(t, t.constant(latent), condition(t, latent.rows() / s), true));
}

void FloreModel::add_segment() {
  if (!config_.conditional) throw CapabilityError("adding segments requires a conditional model");
  if (config_.segments() + 1 > config_.max_segments) throw CapabilityError("segment capacity exhausted");
  config_.keys = (config_.segments() + 1) * config_.seg_len();
}

void FloreModel::set_keys(std::size_t keys) {
  if (keys == config_.keys) return;
  if (!config_.conditional) throw CapabilityError("changing the key count requires a conditional model");
  ModelConfig next = config_;
  next.keys = keys;
  next.validate();
  config_ = next;
}

}  // namespace flore
