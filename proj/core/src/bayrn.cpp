#include "bayrn/bayrn.hpp"

#include <chrono>
#include <filesystem>
#include <sstream>

#include "bayrn/bo.hpp"
#include "bayrn/errors.hpp"
#include "bayrn/policy_file.hpp"

namespace bayrn {

namespace fs = std::filesystem;

TargetDomain make_target(const ExperimentConfig& cfg) { return {cfg.environment, target_params(cfg)}; }

TargetEvaluation evaluate_on_target(const Policy& policy, const Eigen::VectorXd& theta,
                                    const EnvFactory& make_env, const TargetDomain& target,
                                    std::size_t n_tau, double gamma, std::uint64_t seed) {
  if (n_tau < 1) throw Error("evaluate_on_target: n_tau must be >= 1");
  auto env = make_env();
  Rng rng = make_rng(seed, 0);
  const std::span<const double> p(theta.data(), static_cast<std::size_t>(theta.size()));
  TargetEvaluation out;
  double sum = 0.0;
  for (std::size_t m = 0; m < n_tau; ++m) {
    const double ret = run_episode(*env, policy, p, target.xi, rng, gamma).ret;
    out.returns.push_back(ret);
    sum += ret;
  }
  out.mean = sum / static_cast<double>(n_tau);
  return out;
}

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

class Session {
 public:
  Session(const ExperimentConfig& cfg, const TargetDomain& target, const RunOptions& opts,
          std::string mode)
      : cfg_(cfg),
        target_(target),
        opts_(opts),
        space_(make_space(cfg)),
        make_env_(make_env_factory(cfg)),
        policy_(make_policy(cfg)),
        init_(initial_policy_params(cfg)) {
    if (target.kind != cfg.environment) throw Error("target environment does not match the config");
    record_.start.mode = std::move(mode);
    record_.start.environment = to_string(cfg.environment);
    record_.start.seed = cfg.seed;
    record_.start.coordinates = space_.coordinate_names();
    record_.start.lower = space_.box().lower;
    record_.start.upper = space_.box().upper;
    record_.start.n_init = cfg.bayrn.n_init;
    record_.start.n_iter_max = cfg.bayrn.n_iter_max;
    record_.start.n_tau = cfg.bayrn.n_tau;
    record_.start.success_threshold = cfg.bayrn.success_threshold;
  }

  /// Opens the output files. Returns the candidates already on disk when resuming.
  std::vector<CandidateEvent> open() {
    std::vector<CandidateEvent> done;
    if (opts_.out_dir.empty()) return done;
    fs::create_directories(opts_.out_dir);
    const std::string run_path = path("run.jsonl");
    const std::string start_line = to_json_line(record_.start);

    bool append = false;
    if (opts_.resume && fs::exists(run_path)) {
      const RunRecord old = read_run_record(run_path);
      if (to_json_line(old.start) != start_line) {
        throw Error("cannot resume: " + run_path + " belongs to a different run");
      }
      if (old.final) throw Error("cannot resume: " + run_path + " is already complete");
      done = old.candidates;
      // rewrite without a trailing error event
      RunRecordWriter w(run_path, false);
      w.write(start_line);
      for (const auto& c : done) w.write(to_json_line(c));
      append = true;
    }
    save_config(cfg_, path("config.yaml"));
    writer_ = RunRecordWriter(run_path, append);
    timing_ = RunRecordWriter(path("timing.jsonl"), append);
    if (!append) writer_.write(start_line);
    return done;
  }

  void log(const std::string& msg) const {
    if (opts_.log) *opts_.log << msg << std::endl;
  }

  TrainingProblem problem_for(const Eigen::VectorXd& phi) const {
    return {make_env_, DomainSampler(space_, DomainDistrParams::from_vector(space_, phi), cfg_.domain),
            policy_, init_};
  }

  TrainingProblem nominal_problem() const {
    return {make_env_, DomainSampler(nominal_params(cfg_)), policy_, init_};
  }

  /// Trains, evaluates on the target and records one candidate event.
  CandidateEvent candidate(const std::string& event, std::size_t index, const TrainingProblem& problem,
                           const Eigen::VectorXd& phi, std::uint64_t train_seed,
                           std::uint64_t eval_seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult tr = train(problem, cfg_.polopt, train_seed);
    const TargetEvaluation ev = evaluate_on_target(*policy_, tr.params, make_env_, target_,
                                                   cfg_.bayrn.n_tau, cfg_.polopt.discount, eval_seed);
    CandidateEvent c;
    c.event = event;
    c.index = index;
    c.phi = phi;
    c.train_seed = train_seed;
    c.eval_seed = eval_seed;
    c.retrained = tr.retrained;
    c.theta = to_std(tr.params);
    c.j_sim = tr.sim_return;
    c.j_hat = ev.mean;
    c.target_returns = ev.returns;
    c.curve = tr.curve;
    seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
  }

  void commit(const CandidateEvent& c) {
    record_.candidates.push_back(c);
    writer_.write(to_json_line(c));
    timing(c.event, c.index);
    std::ostringstream msg;
    msg << c.event << ' ' << c.index << ": J_sim " << c.j_sim << ", J_hat " << c.j_hat;
    log(msg.str());
  }

  void replay(const CandidateEvent& c) { record_.candidates.push_back(c); }

  RunResult finish(const std::optional<Eigen::VectorXd>& phi_star, const TrainingProblem& problem,
                   std::uint64_t train_seed, std::uint64_t eval_seed, std::size_t dataset_size,
                   std::size_t iterations, const std::optional<GpHyperparams>& gp) {
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult tr = train(problem, cfg_.polopt, train_seed);
    const TargetEvaluation ev = evaluate_on_target(*policy_, tr.params, make_env_, target_,
                                                   cfg_.bayrn.n_tau, cfg_.polopt.discount, eval_seed);
    seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    FinalEvent f;
    f.phi_star = phi_star;
    f.policy_kind = to_string(policy_->kind());
    f.theta = to_std(tr.params);
    f.train_seed = train_seed;
    f.eval_seed = eval_seed;
    f.j_sim = tr.sim_return;
    f.j_hat = ev.mean;
    f.target_returns = ev.returns;
    f.dataset_size = dataset_size;
    f.iterations = iterations;
    f.gp = gp;
    record_.final = f;
    writer_.write(to_json_line(f));
    timing("final", 0);

    RunResult r;
    r.phi_star = phi_star;
    r.policy = {policy_->kind(), tr.params};
    r.j_sim = tr.sim_return;
    r.j_hat = ev.mean;
    r.target_returns = ev.returns;
    r.eval_seed = eval_seed;
    r.iterations = iterations;
    r.record = record_;

    if (!opts_.out_dir.empty()) {
      save_policy_file({r.policy, eval_seed, cfg_.bayrn.n_tau}, path("policy.txt"));
    }
    std::ostringstream msg;
    msg << "final: J_sim " << r.j_sim << ", J_hat " << r.j_hat;
    log(msg.str());
    return r;
  }

  /// Leaves a checkpoint note in the record and rethrows.
  [[noreturn]] void abort(const std::exception& e) {
    record_.error = e.what();
    try {
      writer_.write(error_json_line(e.what()));
    } catch (...) {
    }
    throw;
  }

  std::uint64_t seed(std::uint64_t stream) const { return derive_seed(cfg_.seed, stream); }
  const DistrSpace& space() const { return space_; }
  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  std::string path(const std::string& name) const { return (fs::path(opts_.out_dir) / name).string(); }

  void timing(const std::string& event, std::size_t index) {
    std::ostringstream line;
    line << "{\"event\":\"" << event << "\",\"index\":" << index << ",\"seconds\":" << seconds_ << '}';
    timing_.write(line.str());
  }

  const ExperimentConfig& cfg_;
  const TargetDomain& target_;
  const RunOptions& opts_;
  DistrSpace space_;
  EnvFactory make_env_;
  std::shared_ptr<const Policy> policy_;
  Eigen::VectorXd init_;
  RunRecord record_;
  RunRecordWriter writer_;
  RunRecordWriter timing_;
  double seconds_ = 0.0;
};

}  // namespace

RunResult run_bayrn(const ExperimentConfig& cfg, const TargetDomain& target, const RunOptions& opts) {
  validate(cfg);
  Session s(cfg, target, opts, "bayrn");
  const std::vector<CandidateEvent> done = s.open();
  const auto& b = cfg.bayrn;
  const auto train_seed = [&](std::uint64_t stream) {
    return s.seed(b.common_training_seed ? seed_stream::init_train : stream);
  };

  try {
    BoDataset data(s.space().box());
    std::size_t next = 0;
    const auto from_disk = [&](const char* event, std::size_t index) -> const CandidateEvent* {
      if (next >= done.size()) return nullptr;
      const CandidateEvent& c = done[next];
      if (c.event != event || c.index != index) throw Error("cannot resume: unexpected event order");
      ++next;
      s.replay(c);
      return &c;
    };

    for (std::size_t i = 0; i < b.n_init; ++i) {
      if (const auto* c = from_disk("init-candidate", i)) {
        data.add(c->phi, c->j_hat);
        continue;
      }
      Rng rng = make_rng(cfg.seed, seed_stream::init_phi + i);
      const Eigen::VectorXd phi = random_phi(s.space(), rng).to_vector();
      const CandidateEvent c = s.candidate("init-candidate", i, s.problem_for(phi), phi,
                                           train_seed(seed_stream::init_train + i),
                                           s.seed(seed_stream::init_eval + i));
      data.add(c.phi, c.j_hat);
      s.commit(c);
    }

    std::size_t iterations = 0;
    double j_hat = 0.0;
    do {
      const std::size_t k = iterations;
      if (const auto* old = from_disk("bo-iteration", k)) {
        data.add(old->phi, old->j_hat);
        j_hat = old->j_hat;
      } else {
        const GpModel gp = GpModel::fit(data, b.gp);
        Rng rng = make_rng(cfg.seed, seed_stream::acquisition + k);
        const Eigen::VectorXd phi = maximize_acquisition(gp, b.acquisition, rng);
        CandidateEvent c = s.candidate("bo-iteration", k, s.problem_for(phi), phi,
                                       train_seed(seed_stream::bo_train + k),
                                       s.seed(seed_stream::bo_eval + k));
        c.acquisition = acquisition_value(gp, normalize_phi(gp.box(), phi), b.acquisition.ei_offset);
        data.add(c.phi, c.j_hat);
        j_hat = c.j_hat;
        s.commit(c);
      }
      ++iterations;
    } while (j_hat < b.success_threshold && iterations < b.n_iter_max);

    const GpModel gp = GpModel::fit(data, b.gp);
    Rng rng = make_rng(cfg.seed, seed_stream::final_map);
    const Eigen::VectorXd phi_star = map_phi(gp, b.acquisition, rng);
    return s.finish(phi_star, s.problem_for(phi_star), train_seed(seed_stream::final_train),
                    s.seed(seed_stream::final_eval), data.size(), iterations, gp.hyperparams());
  } catch (const std::exception& e) {
    s.abort(e);
  }
}

RunResult run_udr(const ExperimentConfig& cfg, const TargetDomain& target, const RunOptions& opts) {
  validate(cfg);
  Session s(cfg, target, opts, "udr");
  s.open();
  try {
    Rng rng = make_rng(cfg.seed, seed_stream::init_phi);
    const Eigen::VectorXd phi = random_phi(s.space(), rng).to_vector();
    return s.finish(phi, s.problem_for(phi), s.seed(seed_stream::init_train),
                    s.seed(seed_stream::init_eval), 0, 0, std::nullopt);
  } catch (const std::exception& e) {
    s.abort(e);
  }
}

RunResult run_nominal(const ExperimentConfig& cfg, const TargetDomain& target, const RunOptions& opts) {
  validate(cfg);
  Session s(cfg, target, opts, "nominal");
  s.open();
  try {
    return s.finish(std::nullopt, s.nominal_problem(), s.seed(seed_stream::init_train),
                    s.seed(seed_stream::init_eval), 0, 0, std::nullopt);
  } catch (const std::exception& e) {
    s.abort(e);
  }
}

}  // namespace bayrn
