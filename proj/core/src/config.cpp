#include "bayrn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <utility>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "bayrn/errors.hpp"
#include "builtin_configs.hpp"

namespace bayrn {

const char* to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::furuta: return "furuta";
    case EnvKind::ballcup: return "ballcup";
  }
  return "?";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "furuta") return EnvKind::furuta;
  if (name == "ballcup") return EnvKind::ballcup;
  throw Error("unknown environment '" + name + "'");
}

namespace {

// ---------------------------------------------------------------------------
// reading

class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    present_ = node_.IsDefined() && !node_.IsNull();
    if (present_ && !node_.IsMap()) throw ConfigError(display(), "expected a mapping");
  }

  bool has(const std::string& key) const { return present_ && std::as_const(node_)[key]; }

  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    if (!present_) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node n = std::as_const(node_)[key];
    return n.IsDefined() ? n : YAML::Node(YAML::NodeType::Undefined);
  }

  YAML::Node require(const std::string& key) {
    YAML::Node n = get(key);
    if (!n) throw ConfigError(child(key), "missing required key");
    return n;
  }

  Section sub(const std::string& key) { return Section(get(key), child(key)); }

  template <typename T>
  void read(const std::string& key, T& out) {
    YAML::Node n = get(key);
    if (n) out = convert<T>(n, child(key));
  }

  template <typename T>
  T required(const std::string& key) {
    return convert<T>(require(key), child(key));
  }

  /// Rejects keys that were never asked for.
  void finish() const {
    if (!present_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(child(key), "unknown key");
    }
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  template <typename T>
  static T convert(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) throw ConfigError(path, "expected a scalar");
    if constexpr (std::is_same_v<T, double>) {
      const std::string s = n.Scalar();
      if (s == ".inf" || s == "+.inf") return std::numeric_limits<double>::infinity();
      if (s == "-.inf") return -std::numeric_limits<double>::infinity();
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError(path, "expected a number, got '" + s + "'");
      }
      return v;
    } else if constexpr (std::is_same_v<T, bool>) {
      try {
        return n.as<bool>();
      } catch (const YAML::Exception&) {
        throw ConfigError(path, "expected true or false");
      }
    } else if constexpr (std::is_integral_v<T>) {
      const std::string s = n.Scalar();
      T v{};
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError(path, "expected a non-negative integer, got '" + s + "'");
      }
      return v;
    } else {
      return n.Scalar();
    }
  }

 private:
  YAML::Node node_;
  bool present_ = false;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> read_doubles(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) throw ConfigError(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    out.push_back(Section::convert<double>(n[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Interval read_interval(const YAML::Node& n, const std::string& path) {
  const auto v = read_doubles(n, path);
  if (v.size() != 2) throw ConfigError(path, "expected [lo, hi]");
  if (!(v[0] <= v[1])) throw ConfigError(path, "empty range (lo > hi)");
  return {v[0], v[1]};
}

template <std::size_t N>
void read_array(Section& s, const std::string& key, std::array<double, N>& out) {
  YAML::Node n = s.get(key);
  if (!n) return;
  const auto v = read_doubles(n, s.child(key));
  if (v.size() != N) throw ConfigError(s.child(key), "expected " + std::to_string(N) + " numbers");
  std::copy(v.begin(), v.end(), out.begin());
}

void read_furuta(Section s, FurutaEnvConfig& c) {
  s.read("dt", c.dt);
  s.read("horizon", c.horizon);
  s.read("max_voltage", c.max_voltage);
  s.read("init_jitter_std", c.init_jitter_std);
  read_array(s, "Q", c.reward.Q);
  s.read("R", c.reward.R);
  s.finish();
}

void read_ballcup(Section s, BallCupEnvConfig& c) {
  s.read("dt", c.dt);
  s.read("horizon", c.horizon);
  s.read("init_jitter_std", c.init_jitter_std);
  s.read("proximity_weight", c.proximity_weight);
  s.read("proximity_scale", c.proximity_scale);
  s.read("deviation_weight", c.deviation_weight);
  s.read("gravity", c.model.g);
  s.read("cup_mass", c.model.cup_mass);
  s.read("max_accel", c.model.max_accel);
  s.read("stiction_smoothing", c.model.stiction_smoothing);
  s.read("cup_inner_radius", c.cup.inner_radius);
  s.read("rim_height", c.cup.rim_height);
  s.read("ball_radius", c.cup.ball_radius);
  s.finish();
}

void read_policy(Section s, PolicyConfig& p) {
  const auto kind = s.required<std::string>("kind");
  try {
    p.kind = policy_kind_from_string(kind);
  } catch (const Error& e) {
    throw ConfigError(s.child("kind"), e.what());
  }
  p.init = read_doubles(s.require("init"), s.child("init"));
  {
    Section eb = s.sub("energy_balance");
    eb.read("switch_angle", p.energy_balance.switch_angle);
    eb.read("energy_omega_sq", p.energy_balance.energy_omega_sq);
    read_array(eb, "param_scale", p.energy_balance.param_scale);
    eb.read("max_action", p.energy_balance.max_action);
    eb.finish();
  }
  {
    Section rbf = s.sub("rbf");
    rbf.read("num_basis", p.rbf.num_basis);
    rbf.read("num_outputs", p.rbf.num_outputs);
    rbf.read("output_scale", p.rbf.output_scale);
    rbf.read("max_action", p.rbf.max_action);
    rbf.finish();
  }
  s.finish();
}

void read_polopt(Section s, PolOptConfig& c) {
  if (s.has("algorithm")) {
    const auto name = s.required<std::string>("algorithm");
    try {
      c.algorithm = polopt_algorithm_from_string(name);
    } catch (const Error& e) {
      throw ConfigError(s.child("algorithm"), e.what());
    }
  }
  s.read("n_pop", c.n_pop);
  s.read("n_is", c.n_is);
  s.read("n_iter", c.n_iter);
  s.read("sigma_init", c.sigma_init);
  s.read("rollouts_per_candidate", c.rollouts_per_candidate);
  s.read("discount", c.discount);
  s.read("elite_frac", c.elite_frac);
  s.read("min_std", c.min_std);
  s.read("eval_rollouts", c.eval_rollouts);
  s.read("retrain_threshold", c.retrain_threshold);
  s.read("threads", c.threads);
  s.finish();
}

void read_bayrn(Section s, BayrnSettings& b) {
  s.read("n_init", b.n_init);
  s.read("n_iter_max", b.n_iter_max);
  s.read("n_tau", b.n_tau);
  s.read("success_threshold", b.success_threshold);
  s.read("common_training_seed", b.common_training_seed);
  {
    Section g = s.sub("gp");
    g.read("signal_var_min", b.gp.signal_var_min);
    g.read("signal_var_max", b.gp.signal_var_max);
    g.read("lengthscale_min", b.gp.lengthscale_min);
    g.read("lengthscale_max", b.gp.lengthscale_max);
    g.read("noise_var_min", b.gp.noise_var_min);
    g.read("noise_var_max", b.gp.noise_var_max);
    g.read("grid_signal", b.gp.grid_signal);
    g.read("grid_lengthscale", b.gp.grid_lengthscale);
    g.read("grid_noise", b.gp.grid_noise);
    g.read("refine_sweeps", b.gp.refine_sweeps);
    g.read("jitter_start", b.gp.jitter_start);
    g.read("jitter_max", b.gp.jitter_max);
    g.finish();
  }
  {
    Section a = s.sub("acquisition");
    a.read("n_candidates", b.acquisition.n_candidates);
    a.read("n_refine", b.acquisition.n_refine);
    a.read("initial_step", b.acquisition.initial_step);
    a.read("min_step", b.acquisition.min_step);
    a.read("ei_offset", b.acquisition.ei_offset);
    a.finish();
  }
  s.finish();
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  if (!root || !root.IsMap()) throw ConfigError("<root>", "expected a mapping");
  Section s(root, "");
  ExperimentConfig cfg;

  const auto env = s.required<std::string>("environment");
  try {
    cfg.environment = env_kind_from_string(env);
  } catch (const Error& e) {
    throw ConfigError("environment", e.what());
  }
  s.read("seed", cfg.seed);
  s.read("output_dir", cfg.output_dir);

  {
    const YAML::Node dom = s.require("domain");
    if (!dom.IsMap()) throw ConfigError("domain", "expected a mapping of parameter ids");
    for (const auto& kv : dom) {
      const auto id = kv.first.as<std::string>();
      Section p(kv.second, "domain." + id);
      const double nominal = p.required<double>("nominal");
      DomainParamSpec spec = make_default_spec(id, nominal);
      if (p.has("clamp")) {
        const Interval c = read_interval(p.get("clamp"), p.child("clamp"));
        spec.clamp_lo = c.lo;
        spec.clamp_hi = c.hi;
      }
      p.finish();
      cfg.domain.push_back(spec);
    }
  }

  {
    const YAML::Node rnd = s.require("randomization");
    if (!rnd.IsSequence()) throw ConfigError("randomization", "expected a list");
    for (std::size_t i = 0; i < rnd.size(); ++i) {
      Section r(rnd[i], "randomization[" + std::to_string(i) + "]");
      DistrSlot slot;
      slot.id = r.required<std::string>("id");
      const auto fam = r.required<std::string>("family");
      try {
        slot.family = family_from_string(fam);
      } catch (const Error& e) {
        throw ConfigError(r.child("family"), e.what());
      }
      slot.mean = read_interval(r.require("mean"), r.child("mean"));
      slot.variance = read_interval(r.require("variance"), r.child("variance"));
      r.finish();
      cfg.randomization.push_back(slot);
    }
  }

  if (s.has("target")) {
    const YAML::Node t = s.get("target");
    if (!t.IsMap()) throw ConfigError("target", "expected a mapping of parameter ids");
    for (const auto& kv : t) {
      const auto id = kv.first.as<std::string>();
      cfg.target.emplace_back(id, Section::convert<double>(kv.second, "target." + id));
    }
  } else {
    s.get("target");
  }

  read_furuta(s.sub("furuta"), cfg.furuta);
  read_ballcup(s.sub("ballcup"), cfg.ballcup);
  read_policy(Section(s.require("policy"), "policy"), cfg.policy);
  read_polopt(s.sub("polopt"), cfg.polopt);
  read_bayrn(s.sub("bayrn"), cfg.bayrn);
  s.finish();

  validate(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// writing

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  // keep floats recognizable as floats
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void emit_doubles(YAML::Emitter& out, const double* v, std::size_t n) {
  out << YAML::Flow << YAML::BeginSeq;
  for (std::size_t i = 0; i < n; ++i) out << num(v[i]);
  out << YAML::EndSeq;
}

void kv(YAML::Emitter& out, const char* key, double v) { out << YAML::Key << key << YAML::Value << num(v); }
void kv(YAML::Emitter& out, const char* key, std::size_t v) {
  out << YAML::Key << key << YAML::Value << std::to_string(v);
}
void kv(YAML::Emitter& out, const char* key, const std::string& v) {
  out << YAML::Key << key << YAML::Value << v;
}
void kv(YAML::Emitter& out, const char* key, bool v) {
  out << YAML::Key << key << YAML::Value << (v ? "true" : "false");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<root>", std::string("YAML syntax error: ") + e.what());
  }
  return from_yaml(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  kv(out, "environment", std::string(to_string(cfg.environment)));
  out << YAML::Key << "seed" << YAML::Value << std::to_string(cfg.seed);
  out << YAML::Key << "output_dir" << YAML::Value << YAML::DoubleQuoted << cfg.output_dir;

  out << YAML::Key << "domain" << YAML::Value << YAML::BeginMap;
  for (const auto& d : cfg.domain) {
    out << YAML::Key << d.id << YAML::Value << YAML::Flow << YAML::BeginMap;
    kv(out, "nominal", d.nominal);
    const double c[2] = {d.clamp_lo, d.clamp_hi};
    out << YAML::Key << "clamp" << YAML::Value;
    emit_doubles(out, c, 2);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  out << YAML::Key << "randomization" << YAML::Value << YAML::BeginSeq;
  for (const auto& r : cfg.randomization) {
    out << YAML::Flow << YAML::BeginMap;
    kv(out, "id", r.id);
    kv(out, "family", std::string(to_string(r.family)));
    const double m[2] = {r.mean.lo, r.mean.hi};
    const double v[2] = {r.variance.lo, r.variance.hi};
    out << YAML::Key << "mean" << YAML::Value;
    emit_doubles(out, m, 2);
    out << YAML::Key << "variance" << YAML::Value;
    emit_doubles(out, v, 2);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "target" << YAML::Value << YAML::BeginMap;
  for (const auto& [id, v] : cfg.target) kv(out, id.c_str(), v);
  out << YAML::EndMap;

  const auto& f = cfg.furuta;
  out << YAML::Key << "furuta" << YAML::Value << YAML::BeginMap;
  kv(out, "dt", f.dt);
  kv(out, "horizon", f.horizon);
  kv(out, "max_voltage", f.max_voltage);
  kv(out, "init_jitter_std", f.init_jitter_std);
  out << YAML::Key << "Q" << YAML::Value;
  emit_doubles(out, f.reward.Q.data(), f.reward.Q.size());
  kv(out, "R", f.reward.R);
  out << YAML::EndMap;

  const auto& b = cfg.ballcup;
  out << YAML::Key << "ballcup" << YAML::Value << YAML::BeginMap;
  kv(out, "dt", b.dt);
  kv(out, "horizon", b.horizon);
  kv(out, "init_jitter_std", b.init_jitter_std);
  kv(out, "proximity_weight", b.proximity_weight);
  kv(out, "proximity_scale", b.proximity_scale);
  kv(out, "deviation_weight", b.deviation_weight);
  kv(out, "gravity", b.model.g);
  kv(out, "cup_mass", b.model.cup_mass);
  kv(out, "max_accel", b.model.max_accel);
  kv(out, "stiction_smoothing", b.model.stiction_smoothing);
  kv(out, "cup_inner_radius", b.cup.inner_radius);
  kv(out, "rim_height", b.cup.rim_height);
  kv(out, "ball_radius", b.cup.ball_radius);
  out << YAML::EndMap;

  const auto& p = cfg.policy;
  out << YAML::Key << "policy" << YAML::Value << YAML::BeginMap;
  kv(out, "kind", std::string(to_string(p.kind)));
  out << YAML::Key << "init" << YAML::Value;
  emit_doubles(out, p.init.data(), p.init.size());
  out << YAML::Key << "energy_balance" << YAML::Value << YAML::BeginMap;
  kv(out, "switch_angle", p.energy_balance.switch_angle);
  kv(out, "energy_omega_sq", p.energy_balance.energy_omega_sq);
  out << YAML::Key << "param_scale" << YAML::Value;
  emit_doubles(out, p.energy_balance.param_scale.data(), p.energy_balance.param_scale.size());
  kv(out, "max_action", p.energy_balance.max_action);
  out << YAML::EndMap;
  out << YAML::Key << "rbf" << YAML::Value << YAML::BeginMap;
  kv(out, "num_basis", p.rbf.num_basis);
  kv(out, "num_outputs", p.rbf.num_outputs);
  kv(out, "output_scale", p.rbf.output_scale);
  kv(out, "max_action", p.rbf.max_action);
  out << YAML::EndMap;
  out << YAML::EndMap;

  const auto& o = cfg.polopt;
  out << YAML::Key << "polopt" << YAML::Value << YAML::BeginMap;
  kv(out, "algorithm", std::string(to_string(o.algorithm)));
  kv(out, "n_pop", o.n_pop);
  kv(out, "n_is", o.n_is);
  kv(out, "n_iter", o.n_iter);
  kv(out, "sigma_init", o.sigma_init);
  kv(out, "rollouts_per_candidate", o.rollouts_per_candidate);
  kv(out, "discount", o.discount);
  kv(out, "elite_frac", o.elite_frac);
  kv(out, "min_std", o.min_std);
  kv(out, "eval_rollouts", o.eval_rollouts);
  kv(out, "retrain_threshold", o.retrain_threshold);
  kv(out, "threads", o.threads);
  out << YAML::EndMap;

  const auto& br = cfg.bayrn;
  out << YAML::Key << "bayrn" << YAML::Value << YAML::BeginMap;
  kv(out, "n_init", br.n_init);
  kv(out, "n_iter_max", br.n_iter_max);
  kv(out, "n_tau", br.n_tau);
  kv(out, "success_threshold", br.success_threshold);
  kv(out, "common_training_seed", br.common_training_seed);
  out << YAML::Key << "gp" << YAML::Value << YAML::BeginMap;
  kv(out, "signal_var_min", br.gp.signal_var_min);
  kv(out, "signal_var_max", br.gp.signal_var_max);
  kv(out, "lengthscale_min", br.gp.lengthscale_min);
  kv(out, "lengthscale_max", br.gp.lengthscale_max);
  kv(out, "noise_var_min", br.gp.noise_var_min);
  kv(out, "noise_var_max", br.gp.noise_var_max);
  kv(out, "grid_signal", br.gp.grid_signal);
  kv(out, "grid_lengthscale", br.gp.grid_lengthscale);
  kv(out, "grid_noise", br.gp.grid_noise);
  kv(out, "refine_sweeps", br.gp.refine_sweeps);
  kv(out, "jitter_start", br.gp.jitter_start);
  kv(out, "jitter_max", br.gp.jitter_max);
  out << YAML::EndMap;
  out << YAML::Key << "acquisition" << YAML::Value << YAML::BeginMap;
  kv(out, "n_candidates", br.acquisition.n_candidates);
  kv(out, "n_refine", br.acquisition.n_refine);
  kv(out, "initial_step", br.acquisition.initial_step);
  kv(out, "min_step", br.acquisition.min_step);
  kv(out, "ei_offset", br.acquisition.ei_offset);
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << dump_config(cfg);
  if (!out) throw Error("write failed for '" + path + "'");
}

void validate(const ExperimentConfig& cfg) {
  std::set<std::string> ids;
  for (const auto& d : cfg.domain) {
    if (!ids.insert(d.id).second) throw ConfigError("domain." + d.id, "duplicate parameter");
    try {
      validate_spec(d);
    } catch (const Error& e) {
      throw ConfigError("domain." + d.id, e.what());
    }
  }

  const std::vector<std::string> furuta_ids{"m_p", "m_r", "l_p", "l_r", "d_p", "d_r", "k_m", "R_m", "g"};
  const std::vector<std::string> ballcup_ids{"l_s", "d_s", "m_b", "d_j", "mu_s", "k_s"};
  for (const auto& id : cfg.environment == EnvKind::furuta ? furuta_ids : ballcup_ids) {
    if (!ids.count(id)) throw ConfigError("domain." + id, "missing required key");
  }

  std::set<std::string> randomized;
  for (std::size_t i = 0; i < cfg.randomization.size(); ++i) {
    const auto& r = cfg.randomization[i];
    const std::string path = "randomization[" + std::to_string(i) + "]";
    if (!ids.count(r.id)) throw ConfigError(path + ".id", "unknown parameter '" + r.id + "'");
    if (!randomized.insert(r.id).second) throw ConfigError(path + ".id", "parameter listed twice");
    if (!(r.mean.lo <= r.mean.hi)) throw ConfigError(path + ".mean", "empty range (lo > hi)");
    if (!(r.variance.lo <= r.variance.hi)) throw ConfigError(path + ".variance", "empty range (lo > hi)");
    if (r.variance.lo < 0.0) throw ConfigError(path + ".variance", "variance must be non-negative");
  }
  for (const auto& [id, v] : cfg.target) {
    if (!ids.count(id)) throw ConfigError("target." + id, "unknown parameter");
  }

  const auto& p = cfg.policy;
  const bool furuta = cfg.environment == EnvKind::furuta;
  if (furuta && p.kind != PolicyKind::energy_balance) {
    throw ConfigError("policy.kind", "the furuta environment needs an energy_balance policy");
  }
  if (!furuta && p.kind != PolicyKind::rbf) {
    throw ConfigError("policy.kind", "the ballcup environment needs an rbf policy");
  }
  const std::size_t dim = p.kind == PolicyKind::energy_balance
                              ? EnergyBalancePolicy::kParamDim
                              : p.rbf.num_basis * p.rbf.num_outputs;
  if (p.init.size() != dim) {
    throw ConfigError("policy.init", "expected " + std::to_string(dim) + " values, got " +
                                         std::to_string(p.init.size()));
  }
  if (p.rbf.num_basis < 2) throw ConfigError("policy.rbf.num_basis", "need at least 2 basis functions");
  if (p.rbf.num_outputs < 1) throw ConfigError("policy.rbf.num_outputs", "must be positive");
  if (!(p.energy_balance.max_action > 0.0)) throw ConfigError("policy.energy_balance.max_action", "must be positive");
  if (!(p.rbf.max_action > 0.0)) throw ConfigError("policy.rbf.max_action", "must be positive");

  if (!(cfg.furuta.dt > 0.0)) throw ConfigError("furuta.dt", "must be positive");
  if (cfg.furuta.horizon < 1) throw ConfigError("furuta.horizon", "must be positive");
  if (!(cfg.furuta.max_voltage > 0.0)) throw ConfigError("furuta.max_voltage", "must be positive");
  for (double q : cfg.furuta.reward.Q) {
    if (!(q >= 0.0)) throw ConfigError("furuta.Q", "weights must be non-negative");
  }
  if (!(cfg.furuta.reward.R >= 0.0)) throw ConfigError("furuta.R", "must be non-negative");
  if (!(cfg.ballcup.dt > 0.0)) throw ConfigError("ballcup.dt", "must be positive");
  if (cfg.ballcup.horizon < 1) throw ConfigError("ballcup.horizon", "must be positive");
  if (!(cfg.ballcup.proximity_scale > 0.0)) throw ConfigError("ballcup.proximity_scale", "must be positive");
  if (!(cfg.ballcup.cup.inner_radius > cfg.ballcup.cup.ball_radius)) {
    throw ConfigError("ballcup.cup_inner_radius", "must exceed ball_radius");
  }

  try {
    cfg.polopt.validate();
  } catch (const Error& e) {
    throw ConfigError("polopt", e.what());
  }
  if (cfg.bayrn.n_init < 2) throw ConfigError("bayrn.n_init", "must be at least 2");
  if (cfg.bayrn.n_tau < 1) throw ConfigError("bayrn.n_tau", "must be at least 1");
  if (cfg.bayrn.success_threshold == -std::numeric_limits<double>::infinity()) {
    throw ConfigError("bayrn.success_threshold", "must be finite or .inf");
  }
  if (cfg.bayrn.acquisition.n_candidates < 1) {
    throw ConfigError("bayrn.acquisition.n_candidates", "must be positive");
  }
  if (!(cfg.bayrn.acquisition.min_step > 0.0) ||
      !(cfg.bayrn.acquisition.initial_step >= cfg.bayrn.acquisition.min_step)) {
    throw ConfigError("bayrn.acquisition", "need 0 < min_step <= initial_step");
  }
  const auto& g = cfg.bayrn.gp;
  if (!(g.signal_var_min > 0.0 && g.signal_var_min <= g.signal_var_max)) {
    throw ConfigError("bayrn.gp.signal_var_min", "need 0 < min <= max");
  }
  if (!(g.lengthscale_min > 0.0 && g.lengthscale_min <= g.lengthscale_max)) {
    throw ConfigError("bayrn.gp.lengthscale_min", "need 0 < min <= max");
  }
  if (!(g.noise_var_min > 0.0 && g.noise_var_min <= g.noise_var_max)) {
    throw ConfigError("bayrn.gp.noise_var_min", "need 0 < min <= max");
  }
  if (g.grid_signal < 1 || g.grid_lengthscale < 1 || g.grid_noise < 1) {
    throw ConfigError("bayrn.gp", "grid sizes must be positive");
  }
  if (!(g.jitter_start > 0.0 && g.jitter_start <= g.jitter_max)) {
    throw ConfigError("bayrn.gp.jitter_start", "need 0 < jitter_start <= jitter_max");
  }
}

std::vector<std::string> builtin_config_names() {
  std::vector<std::string> out;
  for (const auto& c : detail::kBuiltinConfigs) out.emplace_back(c.name);
  return out;
}

std::string_view builtin_config_text(const std::string& name) {
  for (const auto& c : detail::kBuiltinConfigs) {
    if (c.name == name) return c.text;
  }
  throw ConfigError("<builtin>", "no built-in config named '" + name + "'");
}

ExperimentConfig builtin_config(const std::string& name) {
  return parse_config(builtin_config_text(name));
}

DistrSpace make_space(const ExperimentConfig& cfg) { return DistrSpace(cfg.randomization); }

DomainParams nominal_params(const ExperimentConfig& cfg) { return nominal_domain(cfg.domain); }

DomainParams target_params(const ExperimentConfig& cfg) {
  DomainParams xi = nominal_params(cfg);
  for (const auto& [id, v] : cfg.target) xi.set(id, v);
  return xi;
}

EnvFactory make_env_factory(const ExperimentConfig& cfg) {
  if (cfg.environment == EnvKind::furuta) {
    const FurutaEnvConfig c = cfg.furuta;
    return [c] { return std::unique_ptr<Environment>(new FurutaEnv(c)); };
  }
  const BallCupEnvConfig c = cfg.ballcup;
  return [c] { return std::unique_ptr<Environment>(new BallCupEnv(c)); };
}

std::shared_ptr<const Policy> make_policy(const ExperimentConfig& cfg) {
  if (cfg.policy.kind == PolicyKind::energy_balance) {
    return std::make_shared<EnergyBalancePolicy>(cfg.policy.energy_balance);
  }
  return std::make_shared<RbfPolicy>(cfg.policy.rbf);
}

Eigen::VectorXd initial_policy_params(const ExperimentConfig& cfg) {
  return Eigen::Map<const Eigen::VectorXd>(cfg.policy.init.data(),
                                           static_cast<Eigen::Index>(cfg.policy.init.size()));
}

}  // namespace bayrn
