#include <cmath>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "bayrn/bayrn.hpp"
#include "bayrn/errors.hpp"
#include "bayrn/policy_file.hpp"
#include "bayrn/run_record.hpp"
#include "test_util.hpp"

namespace bayrn {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

TEST(PolicyFile, RoundTripIsExact) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    PolicyFile f;
    f.params.kind = trial % 2 == 0 ? PolicyKind::rbf : PolicyKind::energy_balance;
    f.params.values = perturb(Eigen::VectorXd::Zero(1 + trial % 20), std::pow(10.0, trial % 7 - 3), rng);
    f.eval_seed = static_cast<std::uint64_t>(uniform(rng, 0.0, 1e18));
    f.n_tau = 1 + static_cast<std::size_t>(trial % 9);
    EXPECT_EQ(parse_policy_file(format_policy_file(f)), f);
  }
}

TEST(PolicyFile, SaveLoad) {
  test::TempDir dir("policy");
  PolicyFile f;
  f.params = {PolicyKind::energy_balance, vec({1.79, 3.32, 2.93, -4.63, 1.57, -3.91})};
  f.eval_seed = 42;
  f.n_tau = 5;
  save_policy_file(f, dir.file("p.txt"));
  EXPECT_EQ(load_policy_file(dir.file("p.txt")), f);
  EXPECT_THROW(load_policy_file(dir.file("missing.txt")), Error);
}

TEST(PolicyFile, MalformedFilesAreRejected) {
  PolicyFile f;
  f.params = {PolicyKind::rbf, vec({0.5, -0.25})};
  const std::string good = format_policy_file(f);
  EXPECT_NO_THROW(parse_policy_file(good));
  EXPECT_THROW(parse_policy_file(""), Error);
  EXPECT_THROW(parse_policy_file("bayrn-policy 2\n"), Error);
  std::string bad = good;
  bad.replace(bad.find("dim 2"), 5, "dim 3");
  EXPECT_THROW(parse_policy_file(bad), Error);
  bad = good;
  bad.replace(bad.find("0.5"), 3, "x.5");
  EXPECT_THROW(parse_policy_file(bad), Error);
  bad = good;
  bad.replace(bad.find("kind rbf"), 8, "kind fnn");
  EXPECT_THROW(parse_policy_file(bad), Error);
}

RunRecord sample_record() {
  RunRecord r;
  r.start.mode = "bayrn";
  r.start.environment = "furuta";
  r.start.seed = 123;
  r.start.coordinates = {"m_p.mean", "m_p.var"};
  r.start.lower = vec({0.0192, 0.0});
  r.start.upper = vec({0.0288, 5.76e-6});
  r.start.n_init = 2;
  r.start.n_iter_max = 4;
  r.start.n_tau = 3;
  r.start.success_threshold = std::numeric_limits<double>::infinity();

  CandidateEvent c;
  c.event = "init-candidate";
  c.index = 0;
  c.phi = vec({0.02, 1e-6});
  c.train_seed = 99;
  c.eval_seed = 100;
  c.theta = {0.1, 0.2};
  c.j_sim = 480.125;
  c.j_hat = 0.1 + 0.2;
  c.target_returns = {0.3, 0.30000000000000004};
  c.curve = {{0, 1.5, 1.0}, {1, 2.5, 2.0}};
  r.candidates.push_back(c);
  c.event = "bo-iteration";
  c.acquisition = 1e-7;
  c.phi = vec({0.025, 2e-6});
  r.candidates.push_back(c);

  FinalEvent f;
  f.phi_star = vec({0.0264, 3e-6});
  f.policy_kind = "energy_balance";
  f.theta = {1.0, -2.0};
  f.train_seed = 7;
  f.eval_seed = 8;
  f.j_sim = 500.0;
  f.j_hat = 499.5;
  f.target_returns = {499.0, 500.0};
  f.dataset_size = 2;
  f.iterations = 1;
  GpHyperparams h;
  h.signal_var = 1.25;
  h.lengthscales = vec({0.3, 0.7});
  h.noise_var = 1e-4;
  f.gp = h;
  r.final = f;
  return r;
}

void write_record(const RunRecord& r, const std::string& path, bool with_error) {
  RunRecordWriter w(path, false);
  w.write(to_json_line(r.start));
  for (const auto& c : r.candidates) w.write(to_json_line(c));
  if (with_error) w.write(error_json_line("stopped"));
  if (r.final) w.write(to_json_line(*r.final));
}

TEST(RunRecord, RoundTripPreservesEveryField) {
  test::TempDir dir("record");
  const RunRecord r = sample_record();
  write_record(r, dir.file("run.jsonl"), false);
  const RunRecord back = read_run_record(dir.file("run.jsonl"));

  EXPECT_EQ(to_json_line(back.start), to_json_line(r.start));
  EXPECT_TRUE(std::isinf(back.start.success_threshold));
  ASSERT_EQ(back.candidates.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(to_json_line(back.candidates[i]), to_json_line(r.candidates[i]));
  EXPECT_EQ(back.candidates[0].j_hat, 0.1 + 0.2);
  EXPECT_FALSE(back.candidates[0].acquisition);
  EXPECT_EQ(*back.candidates[1].acquisition, 1e-7);
  ASSERT_TRUE(back.final);
  EXPECT_EQ(to_json_line(*back.final), to_json_line(*r.final));
  EXPECT_EQ(back.final->gp->lengthscales, r.final->gp->lengthscales);
  EXPECT_FALSE(back.error);
}

TEST(RunRecord, ErrorEventsAreKept) {
  test::TempDir dir("record_err");
  RunRecord r = sample_record();
  r.final.reset();
  write_record(r, dir.file("run.jsonl"), true);
  const RunRecord back = read_run_record(dir.file("run.jsonl"));
  ASSERT_TRUE(back.error);
  EXPECT_EQ(*back.error, "stopped");
  EXPECT_FALSE(back.final);
}

TEST(RunRecord, MalformedRecordsAreRejected) {
  test::TempDir dir("record_bad");
  const auto write = [&](const std::string& text) {
    std::ofstream out(dir.file("r.jsonl"));
    out << text;
  };
  write("{\"event\":\"start\"");
  EXPECT_THROW(read_run_record(dir.file("r.jsonl")), Error);
  write(to_json_line(sample_record().candidates[0]) + "\n");
  EXPECT_THROW(read_run_record(dir.file("r.jsonl")), Error);
  write(to_json_line(sample_record().start) + "\n{\"event\":\"mystery\"}\n");
  EXPECT_THROW(read_run_record(dir.file("r.jsonl")), Error);
  EXPECT_THROW(read_run_record(dir.file("absent.jsonl")), Error);
}

TEST(RunRecord, DatasetCollectsEveryEvaluatedCandidate) {
  const RunRecord r = sample_record();
  const BoDataset data = dataset_from_record(r);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data.inputs()[1], r.candidates[1].phi);
  EXPECT_EQ(data.targets()[0], r.candidates[0].j_hat);
  EXPECT_EQ(data.box().upper, r.start.upper);
}

TEST(Persistence, SavedPolicyReproducesTheLoggedReturn) {
  test::TempDir dir("repro");
  ExperimentConfig cfg = builtin_config("furuta");
  cfg.seed = 17;
  cfg.furuta.horizon = 150;
  cfg.furuta.init_jitter_std = 0.02;
  cfg.polopt.n_pop = 8;
  cfg.polopt.n_is = 4;
  cfg.polopt.n_iter = 2;
  cfg.polopt.eval_rollouts = 1;
  cfg.bayrn.n_tau = 3;
  const RunResult r = run_udr(cfg, make_target(cfg), {dir.path().string(), false, nullptr});

  const ExperimentConfig saved = load_config(dir.file("config.yaml"));
  EXPECT_EQ(saved, cfg);
  const PolicyFile pf = load_policy_file(dir.file("policy.txt"));
  EXPECT_EQ(pf.params, r.policy);
  const TargetEvaluation ev = evaluate_on_target(*make_policy(saved), pf.params.values, make_env_factory(saved),
                                                 make_target(saved), pf.n_tau, saved.polopt.discount,
                                                 pf.eval_seed);
  const RunRecord rec = read_run_record(dir.file("run.jsonl"));
  ASSERT_TRUE(rec.final);
  EXPECT_EQ(ev.mean, rec.final->j_hat);
  EXPECT_EQ(ev.returns, rec.final->target_returns);
}

}  // namespace
}  // namespace bayrn
