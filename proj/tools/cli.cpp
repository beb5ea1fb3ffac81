#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "bayrn/bayrn.hpp"
#include "bayrn/bo.hpp"
#include "bayrn/config.hpp"
#include "bayrn/errors.hpp"
#include "bayrn/policy_file.hpp"
#include "bayrn/run_record.hpp"

namespace bayrn::tools {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ExperimentConfig resolve_config(const std::string& spec) {
  if (fs::exists(spec)) return load_config(spec);
  const auto names = builtin_config_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return builtin_config(spec);
  throw ConfigError("--config", "no such file or built-in config '" + spec + "'");
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool resume = false;
  bool quiet = false;
};

CLI::App* add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--config", a.config, "Config file or built-in config name")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Override the config seed");
  cmd->add_option("--out", a.out, "Output directory (default: output_dir of the config)");
  cmd->add_flag("--resume", a.resume, "Continue an interrupted run in the output directory");
  cmd->add_flag("--quiet", a.quiet, "No progress output");
  return cmd;
}

ExperimentConfig prepare(const RunArgs& a) {
  ExperimentConfig cfg = resolve_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (!a.out.empty()) cfg.output_dir = a.out;
  validate(cfg);
  return cfg;
}

RunOptions run_options(const ExperimentConfig& cfg, const RunArgs& a, std::ostream& err) {
  RunOptions o;
  o.out_dir = cfg.output_dir;
  o.resume = a.resume;
  o.log = a.quiet ? nullptr : &err;
  return o;
}

void print_phi(std::ostream& out, const char* label, const DistrSpace& space, const Eigen::VectorXd& phi) {
  const auto names = space.coordinate_names();
  out << label;
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    if (space.box().is_degenerate(i)) continue;
    out << ' ' << names[static_cast<std::size_t>(i)] << '=' << num(phi[i]);
  }
  out << '\n';
}

void print_result(std::ostream& out, const ExperimentConfig& cfg, const RunResult& r) {
  out << "mode " << r.record.start.mode << '\n';
  if (r.phi_star) print_phi(out, "phi", make_space(cfg), *r.phi_star);
  out << "iterations " << r.iterations << '\n';
  out << "J_sim " << num(r.j_sim) << '\n';
  out << "J_hat " << num(r.j_hat) << '\n';
  out << "output " << cfg.output_dir << '\n';
}

std::vector<Eigen::Index> free_coordinates(const Box& box) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < box.dim(); ++i) {
    if (!box.is_degenerate(i)) out.push_back(i);
  }
  return out;
}

int cmd_eval(const std::string& policy_path, std::optional<std::size_t> n_tau, std::string config,
             std::optional<std::uint64_t> seed, std::ostream& out) {
  const PolicyFile file = load_policy_file(policy_path);
  if (config.empty()) config = (fs::path(policy_path).parent_path() / "config.yaml").string();
  const ExperimentConfig cfg = resolve_config(config);
  const auto policy = make_policy(cfg);
  if (policy->kind() != file.params.kind) throw Error("policy kind does not match the config");
  if (static_cast<std::size_t>(file.params.values.size()) != policy->param_dim()) {
    throw DimensionMismatch("policy parameters", policy->param_dim(),
                            static_cast<std::size_t>(file.params.values.size()));
  }
  const TargetEvaluation ev =
      evaluate_on_target(*policy, file.params.values, make_env_factory(cfg), make_target(cfg),
                         n_tau.value_or(file.n_tau), cfg.polopt.discount, seed.value_or(file.eval_seed));
  out << "J_hat " << num(ev.mean) << '\n';
  out << "returns";
  for (double r : ev.returns) out << ' ' << num(r);
  out << '\n';
  return kOk;
}

int cmd_export_grid(const std::string& record_path, const std::string& dims, std::size_t resolution,
                    const std::string& out_path, std::ostream& out) {
  const RunRecord rec = read_run_record(record_path);
  const BoDataset data = dataset_from_record(rec);
  if (data.size() < 1) throw Error("run record holds no evaluated candidates");

  const auto comma = dims.find(',');
  std::size_t a = 0, b = 0;
  const auto parse = [&](std::string_view s, std::size_t& v) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
  };
  if (comma == std::string::npos || !parse(std::string_view(dims).substr(0, comma), a) ||
      !parse(std::string_view(dims).substr(comma + 1), b)) {
    throw ConfigError("--dims", "expected two indices 'i,j'");
  }
  const auto free = free_coordinates(data.box());
  if (a >= free.size() || b >= free.size() || a == b) {
    throw ConfigError("--dims", "need two distinct indices below " + std::to_string(free.size()) +
                                    " (the searched coordinates)");
  }
  if (resolution < 1) throw ConfigError("--resolution", "must be positive");

  const GpModel gp = rec.final && rec.final->gp ? GpModel::condition(data, *rec.final->gp)
                     : data.size() >= 2        ? GpModel::fit(data)
                                               : GpModel::condition(data, GpHyperparams{1.0, Eigen::VectorXd::Ones(data.box().dim()), 1e-2});
  Eigen::VectorXd anchor;
  if (rec.final && rec.final->phi_star) {
    anchor = *rec.final->phi_star;
  } else {
    Rng rng = make_rng(rec.start.seed, seed_stream::final_map);
    anchor = map_phi(gp, SearchOptions{}, rng);
  }

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw Error("cannot write '" + out_path + "'");
  }
  std::ostream& csv = out_path.empty() ? out : file;
  csv << "phi1,phi2,mean,std\n";
  for (const auto& p : gp_grid(gp, free[a], free[b], resolution, anchor)) {
    csv << num(p.x) << ',' << num(p.y) << ',' << num(p.mean) << ',' << num(p.std) << '\n';
  }
  if (!csv) throw Error("CSV write failed");
  return kOk;
}

int cmd_sim2sim(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = prepare(a);
  const TargetDomain target = make_target(cfg);
  const RunResult r = run_bayrn(cfg, target, run_options(cfg, a, err));
  print_result(out, cfg, r);

  const DistrSpace space = make_space(cfg);
  const auto names = space.coordinate_names();
  for (std::size_t k = 0; k < space.slots().size(); ++k) {
    const auto i = static_cast<Eigen::Index>(2 * k);
    if (space.box().is_degenerate(i)) continue;
    const double truth = target.xi.at(space.slots()[k].id);
    const double width = space.box().upper[i] - space.box().lower[i];
    out << "recovery " << names[static_cast<std::size_t>(i)] << " found " << num((*r.phi_star)[i])
        << " truth " << num(truth) << " error/width " << num(std::fabs((*r.phi_star)[i] - truth) / width)
        << '\n';
  }
  return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  if (path.empty()) {
    for (const auto& name : builtin_config_names()) {
      builtin_config(name);
      out << name << ": ok\n";
    }
    return kOk;
  }
  resolve_config(path);
  out << path << ": ok\n";
  return kOk;
}

}  // namespace

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian domain randomization laboratory", "bayrn_lab"};
  app.require_subcommand(1);

  RunArgs bayrn_args, udr_args, nominal_args, sim_args;
  bayrn_args.config = udr_args.config = nominal_args.config = "furuta";
  sim_args.config = "furuta_sim2sim";
  auto* bayrn_cmd = app.add_subcommand("bayrn", "Bayesian domain randomization");
  bayrn_cmd->require_subcommand(1);
  auto* bayrn_run = add_run_options(bayrn_cmd->add_subcommand("run", "Run BayRn"), bayrn_args);
  auto* udr_cmd = app.add_subcommand("udr", "Uniform domain randomization baseline");
  udr_cmd->require_subcommand(1);
  auto* udr_run = add_run_options(udr_cmd->add_subcommand("run", "Train with one random phi"), udr_args);
  auto* nominal_cmd = app.add_subcommand("nominal", "Training on the nominal domain");
  nominal_cmd->require_subcommand(1);
  auto* nominal_run =
      add_run_options(nominal_cmd->add_subcommand("run", "Train without randomization"), nominal_args);
  auto* sim_cmd = add_run_options(
      app.add_subcommand("sim2sim", "BayRn on the 2-D pole-mass search against hidden ground truth"),
      sim_args);

  std::string policy_path, eval_config;
  std::optional<std::size_t> n_tau;
  std::optional<std::uint64_t> eval_seed;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved policy on the target domain");
  eval_cmd->add_option("--policy-file", policy_path, "Policy file")->required();
  eval_cmd->add_option("--n-tau", n_tau, "Number of target rollouts (default: from the policy file)");
  eval_cmd->add_option("--config", eval_config, "Config (default: config.yaml next to the policy file)");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed (default: from the policy file)");

  std::string record_path, dims = "0,1", grid_out;
  std::size_t resolution = 50;
  auto* grid_cmd = app.add_subcommand("export-gp-grid", "Write the GP posterior on a 2-D slice as CSV");
  grid_cmd->add_option("--run-record", record_path, "run.jsonl of a finished run")->required();
  grid_cmd->add_option("--dims", dims, "Two searched coordinates 'i,j'")->capture_default_str();
  grid_cmd->add_option("--resolution", resolution, "Grid points per axis")->capture_default_str();
  grid_cmd->add_option("--out", grid_out, "CSV path (default: stdout)");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a config file (default: all built-ins)");
  validate_cmd->add_option("config", validate_path, "Config file or built-in name");

  std::string show_name;
  auto* show_cmd = app.add_subcommand("show-config", "Print a built-in config");
  show_cmd->add_option("name", show_name, "Built-in config name")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (bayrn_run->parsed()) {
      const auto cfg = prepare(bayrn_args);
      print_result(out, cfg, run_bayrn(cfg, make_target(cfg), run_options(cfg, bayrn_args, err)));
    } else if (udr_run->parsed()) {
      const auto cfg = prepare(udr_args);
      print_result(out, cfg, run_udr(cfg, make_target(cfg), run_options(cfg, udr_args, err)));
    } else if (nominal_run->parsed()) {
      const auto cfg = prepare(nominal_args);
      print_result(out, cfg, run_nominal(cfg, make_target(cfg), run_options(cfg, nominal_args, err)));
    } else if (sim_cmd->parsed()) {
      return cmd_sim2sim(sim_args, out, err);
    } else if (eval_cmd->parsed()) {
      return cmd_eval(policy_path, n_tau, eval_config, eval_seed, out);
    } else if (grid_cmd->parsed()) {
      return cmd_export_grid(record_path, dims, resolution, grid_out, out);
    } else if (validate_cmd->parsed()) {
      return cmd_validate(validate_path, out);
    } else if (show_cmd->parsed()) {
      out << builtin_config_text(show_name);
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace bayrn::tools
