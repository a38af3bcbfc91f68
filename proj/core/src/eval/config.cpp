#include "flore/eval/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "flore/error.hpp"
#include "flore/gen/layers.hpp"
#include "flore/gen/losses.hpp"
#include "flore/linsys/cs_matrix.hpp"
#include "flore/random.hpp"

namespace flore::eval {

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::kCm: return "cm";
    case Estimator::kCs: return "cs";
    case Estimator::kCu: return "cu";
    case Estimator::kAg: return "ag";
    case Estimator::kCmEm: return "cm+em";
    case Estimator::kOmp: return "omp";
    case Estimator::kLsq: return "lsq";
    case Estimator::kFlore: return "flore";
    case Estimator::kFlorePerfect: return "flore-perfect";
  }
  return "?";
}

Estimator parse_estimator(const std::string& name) {
  for (auto e : {Estimator::kCm, Estimator::kCs, Estimator::kCu, Estimator::kAg, Estimator::kCmEm, Estimator::kOmp,
                 Estimator::kLsq, Estimator::kFlore, Estimator::kFlorePerfect})
    if (to_string(e) == name) return e;
  throw ConfigError("unknown estimator '" + name + "'");
}

bool is_flore(Estimator e) noexcept { return e == Estimator::kFlore || e == Estimator::kFlorePerfect; }

SeedSet SeedSet::derive(std::uint64_t master) {
  SeedSet s;
  s.master = master;
  s.trace = derive_seed(master, 1);
  s.permutation = derive_seed(master, 2);
  s.plane = derive_seed(master, 3);
  s.model = derive_seed(master, 4);
  s.train = derive_seed(master, 5);
  s.recovery = derive_seed(master, 6);
  s.rip = derive_seed(master, 7);
  s.perturb = derive_seed(master, 8);
  return s;
}

void ExperimentConfig::set_seed(std::uint64_t master) {
  seeds = SeedSet::derive(master);
  trace.synthetic.rng_seed = seeds.trace;
  trace.synthetic.permutation_seed = seeds.permutation;
  flore.model.seed = seeds.model;
  flore.train.seed = seeds.train;
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name: must not be empty");
  if (estimators.empty()) throw ConfigError("estimators: at least one estimator is required");
  if (plane.budgets.empty()) throw ConfigError("plane.budgets: at least one budget is required");
  for (auto b : plane.budgets)
    if (b == 0) throw ConfigError("plane.budgets: budgets must be positive");
  if (plane.cm_rows == 0) throw ConfigError("plane.cm_rows: must be positive");
  if (plane.filter_entries == 0) throw ConfigError("plane.filter_entries: must be positive");
  if (!(plane.threshold > 0)) throw ConfigError("plane.threshold: must be positive");
  if (plane.bloom_hashes == 0) throw ConfigError("plane.bloom_hashes: must be positive");
  if (!trace.from_file) {
    try {
      trace.synthetic.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("trace.synthetic: ") + e.what());
    }
  } else if (trace.path.empty()) {
    throw ConfigError("trace.file: path must not be empty");
  }
  if (refine.steps == 0) throw ConfigError("refine.steps: must be positive");
  if (flore.snapshot_interval == 0) throw ConfigError("flore.snapshot_interval: must be positive");
  if (flore.window == 0) throw ConfigError("flore.window: must be positive");
  if (flore.train.epochs == 0) throw ConfigError("flore.train.epochs: must be positive");
  if (flore.train.batch == 0) throw ConfigError("flore.train.batch: must be positive");
  if (!(flore.train.learning_rate >= 0)) throw ConfigError("flore.train.learning_rate: must be non-negative");
  if (flore.model.latent < 3) throw ConfigError("flore.model.latent: must be at least 3");
  if (flore.model.hidden == 0 || flore.model.blocks == 0) throw ConfigError("flore.model: hidden and blocks must be positive");
  if (rip.m == 0 || rip.n == 0 || rip.m > rip.n) throw ConfigError("rip: need 0 < m <= n");
  if (rip.s == 0 || rip.s > rip.n) throw ConfigError("rip.s: need 0 < s <= n");
  if (rip.trials == 0) throw ConfigError("rip.trials: must be positive");
  for (const auto& v : ablation.variants) {
    static const std::set<std::string> known = {"naive", "no-sp", "no-ort", "no-rec", "no-con", "full"};
    if (!known.count(v)) throw ConfigError("ablation.variants: unknown variant '" + v + "'");
  }
  for (double f : robustness.temporal)
    if (!(f >= 0 && f <= 2)) throw ConfigError("robustness.temporal: factors must lie in [0, 2]");
  for (double f : robustness.spatial)
    if (!(f > 0 && f <= 1)) throw ConfigError("robustness.spatial: factors must lie in (0, 1]");
  for (double f : robustness.natural)
    if (!(f == 0 || f == 1 || f == 2)) throw ConfigError("robustness.natural: windows are 0, 1 or 2");
}

std::size_t parse_bytes(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == 0) throw ConfigError("invalid byte size '" + text + "'");
  std::size_t value = std::stoull(text.substr(0, pos));
  std::string unit;
  for (std::size_t i = pos; i < text.size(); ++i)
    if (!std::isspace(static_cast<unsigned char>(text[i]))) unit += static_cast<char>(std::toupper(text[i]));
  if (unit.empty() || unit == "B") return value;
  if (unit == "KB" || unit == "K") return value * 1024;
  if (unit == "MB" || unit == "M") return value * 1024 * 1024;
  throw ConfigError("invalid byte size '" + text + "'");
}

namespace {

class Section {
 public:
  Section(const YAML::Node& node, std::string path)
      : node_(node), present_(node && !node.IsNull()), path_(std::move(path)) {
    if (present_ && !node_.IsMap()) throw ConfigError(path_ + ": expected a mapping");
  }

  /// Rejects keys outside `allowed`.
  void allow(std::initializer_list<const char*> allowed) const {
    if (!present_) return;
    std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!names.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

  bool has(const char* key) const { return present_ && node_[key]; }
  Section sub(const char* key) const { return Section(present_ ? node_[key] : YAML::Node(), where(key)); }
  YAML::Node raw(const char* key) const { return present_ ? node_[key] : YAML::Node(); }

  template <typename T>
  void get(const char* key, T& out) const {
    if (!has(key)) return;
    try {
      out = node_[key].as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(where(key) + ": wrong type");
    }
  }

  void get_size(const char* key, std::size_t& out) const {
    if (!has(key)) return;
    long long v = 0;
    get(key, v);
    if (v < 0) throw ConfigError(where(key) + ": must be non-negative");
    out = static_cast<std::size_t>(v);
  }

  template <typename T>
  void get_list(const char* key, std::vector<T>& out) const {
    if (!has(key)) return;
    const auto n = node_[key];
    if (!n.IsSequence()) throw ConfigError(where(key) + ": expected a list");
    out.clear();
    try {
      for (const auto& item : n) out.push_back(item.as<T>());
    } catch (const YAML::Exception&) {
      throw ConfigError(where(key) + ": wrong element type");
    }
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  YAML::Node node_;
  bool present_ = false;
  std::string path_;
};

void read_trace(const Section& s, TraceSource& t) {
  s.allow({"synthetic", "file"});
  if (s.has("synthetic") && s.has("file")) throw ConfigError("trace: give either synthetic or file, not both");
  if (s.has("file")) {
    auto f = s.sub("file");
    f.allow({"path", "key_length"});
    std::string path;
    f.get("path", path);
    t.from_file = true;
    t.path = path;
    f.get_size("key_length", t.key_length);
    return;
  }
  auto y = s.sub("synthetic");
  y.allow({"distribution", "keys", "items", "alpha", "x_min", "lambda", "mu", "sigma", "key_length", "permute"});
  auto& spec = t.synthetic;
  if (y.has("distribution")) {
    std::string d;
    y.get("distribution", d);
    try {
      spec.kind = parse_distribution(d);
    } catch (const ParameterError& e) {
      throw ConfigError(y.where("distribution") + ": " + e.what());
    }
  }
  y.get_size("keys", spec.keys);
  std::size_t items = spec.total_items;
  y.get_size("items", items);
  spec.total_items = items;
  y.get("alpha", spec.alpha);
  y.get("x_min", spec.x_min);
  y.get("lambda", spec.lambda);
  y.get("mu", spec.mu);
  y.get("sigma", spec.sigma);
  y.get_size("key_length", spec.key_length);
  y.get("permute", spec.permute);
}

void read_plane(const Section& s, PlaneSettings& p) {
  s.allow({"budgets", "expected_keys", "cm_rows", "filter_entries", "threshold", "bloom_hashes"});
  if (s.has("budgets")) {
    const auto n = s.raw("budgets");
    if (!n.IsSequence()) throw ConfigError("plane.budgets: expected a list");
    p.budgets.clear();
    for (const auto& item : n) p.budgets.push_back(parse_bytes(item.as<std::string>()));
  }
  s.get_size("expected_keys", p.expected_keys);
  s.get_size("cm_rows", p.cm_rows);
  s.get_size("filter_entries", p.filter_entries);
  s.get("threshold", p.threshold);
  s.get_size("bloom_hashes", p.bloom_hashes);
}

void read_model(const Section& s, ModelConfig& m) {
  s.allow({"latent", "hidden", "blocks", "ae_hidden", "coupling", "clamp", "conditional", "segment_length",
           "max_segments", "cond_dim"});
  s.get_size("latent", m.latent);
  s.get_size("hidden", m.hidden);
  s.get_size("blocks", m.blocks);
  s.get_size("ae_hidden", m.ae_hidden);
  if (s.has("coupling")) {
    std::string c;
    s.get("coupling", c);
    try {
      m.coupling = parse_coupling(c);
    } catch (const Error& e) {
      throw ConfigError(s.where("coupling") + ": " + e.what());
    }
  }
  s.get("clamp", m.clamp);
  s.get("conditional", m.conditional);
  s.get_size("segment_length", m.segment_length);
  s.get_size("max_segments", m.max_segments);
  s.get_size("cond_dim", m.cond_dim);
}

void read_train(const Section& s, TrainConfig& t) {
  s.allow({"epochs", "batch", "learning_rate", "beta1", "beta2", "adam_eps", "shuffle", "resample_z", "discrepancy",
           "weights"});
  s.get_size("epochs", t.epochs);
  s.get_size("batch", t.batch);
  s.get("learning_rate", t.learning_rate);
  s.get("beta1", t.beta1);
  s.get("beta2", t.beta2);
  s.get("adam_eps", t.adam_eps);
  s.get("shuffle", t.shuffle);
  s.get("resample_z", t.resample_z);
  if (s.has("discrepancy")) {
    std::string d;
    s.get("discrepancy", d);
    try {
      t.loss.discrepancy = parse_discrepancy(d);
    } catch (const Error& e) {
      throw ConfigError(s.where("discrepancy") + ": " + e.what());
    }
  }
  auto w = s.sub("weights");
  w.allow({"rec", "inv", "ort", "sp"});
  w.get("rec", t.loss.weights.rec);
  w.get("inv", t.loss.weights.inv);
  w.get("ort", t.loss.weights.ort);
  w.get("sp", t.loss.weights.sp);
  if (t.loss.weights.rec < 0 || t.loss.weights.inv < 0 || t.loss.weights.ort < 0 || t.loss.weights.sp < 0)
    throw ConfigError(w.where("*") + ": weights must be non-negative");
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  Section top(root, "");
  top.allow({"name", "seed", "output_dir", "trace", "plane", "baselines", "estimators", "refine", "solvers", "flore",
             "metrics", "timing", "rip", "ablation", "robustness"});

  ExperimentConfig c;
  top.get("name", c.name);
  std::string out = c.output_dir.string();
  top.get("output_dir", out);
  c.output_dir = out;
  std::uint64_t seed = 0;
  top.get("seed", seed);

  read_trace(top.sub("trace"), c.trace);
  read_plane(top.sub("plane"), c.plane);

  auto base = top.sub("baselines");
  base.allow({"memory", "ag_slots"});
  if (base.has("memory")) {
    std::string mem;
    base.get("memory", mem);
    if (mem == "total") c.baselines.memory = BaselineMemory::kTotal;
    else if (mem == "plane-cm") c.baselines.memory = BaselineMemory::kPlaneCm;
    else throw ConfigError("baselines.memory: expected total or plane-cm");
  }
  base.get_size("ag_slots", c.baselines.ag_slots);

  std::vector<std::string> names;
  top.get_list("estimators", names);
  for (const auto& n : names) c.estimators.push_back(parse_estimator(n));

  auto refine = top.sub("refine");
  refine.allow({"steps", "accept_if_improves", "epsilon"});
  refine.get_size("steps", c.refine.steps);
  refine.get("accept_if_improves", c.refine.accept_if_improves);
  refine.get("epsilon", c.refine.epsilon);

  auto solvers = top.sub("solvers");
  solvers.allow({"omp_sparsity", "omp_tol", "lsq_iters", "lsq_tol", "dense_limit"});
  solvers.get_size("omp_sparsity", c.solvers.omp_sparsity);
  solvers.get("omp_tol", c.solvers.omp_tol);
  solvers.get_size("lsq_iters", c.solvers.lsq_iters);
  solvers.get("lsq_tol", c.solvers.lsq_tol);
  solvers.get_size("dense_limit", c.solvers.dense_limit);

  auto fl = top.sub("flore");
  fl.allow({"snapshot_interval", "window", "model", "train"});
  fl.get_size("snapshot_interval", c.flore.snapshot_interval);
  fl.get_size("window", c.flore.window);
  read_model(fl.sub("model"), c.flore.model);
  read_train(fl.sub("train"), c.flore.train);

  auto metrics = top.sub("metrics");
  metrics.allow({"heavy_hitters"});
  metrics.get_size("heavy_hitters", c.heavy_hitters);

  auto timing = top.sub("timing");
  timing.allow({"passes"});
  timing.get_size("passes", c.timing_passes);

  auto rip = top.sub("rip");
  rip.allow({"m", "n", "s", "trials", "cm_rows", "kinds"});
  rip.get_size("m", c.rip.m);
  rip.get_size("n", c.rip.n);
  rip.get_size("s", c.rip.s);
  rip.get_size("trials", c.rip.trials);
  rip.get_size("cm_rows", c.rip.cm_rows);
  rip.get_list("kinds", c.rip.kinds);
  for (const auto& k : c.rip.kinds) {
    if (k == "CM" || k == "CS") continue;
    try {
      parse_ensemble(k);
    } catch (const Error&) {
      throw ConfigError("rip.kinds: unknown matrix kind '" + k + "'");
    }
  }

  auto abl = top.sub("ablation");
  abl.allow({"variants", "budget"});
  abl.get_list("variants", c.ablation.variants);
  if (abl.has("budget")) c.ablation.budget = parse_bytes(abl.raw("budget").as<std::string>());

  auto rob = top.sub("robustness");
  rob.allow({"temporal", "natural", "spatial", "budget"});
  rob.get_list("temporal", c.robustness.temporal);
  rob.get_list("natural", c.robustness.natural);
  rob.get_list("spatial", c.robustness.spatial);
  if (rob.has("budget")) c.robustness.budget = parse_bytes(rob.raw("budget").as<std::string>());

  c.set_seed(seed);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace flore::eval
