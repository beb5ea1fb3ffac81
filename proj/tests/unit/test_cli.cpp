#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bayrn/config.hpp"
#include "cli.hpp"
#include "test_util.hpp"

namespace bayrn::tools {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Writes a fast variant of the sim2sim config into `dir`.
std::string tiny_sim2sim(const test::TempDir& dir) {
  ExperimentConfig cfg = builtin_config("furuta_sim2sim");
  cfg.furuta.horizon = 100;
  cfg.polopt.n_pop = 8;
  cfg.polopt.n_is = 4;
  cfg.polopt.n_iter = 2;
  cfg.bayrn.n_init = 2;
  cfg.bayrn.n_iter_max = 2;
  cfg.bayrn.acquisition.n_candidates = 64;
  const std::string path = dir.file("tiny.yaml");
  save_config(cfg, path);
  return path;
}

TEST(Cli, ValidateConfigAcceptsTheBuiltins) {
  const Result r = run({"validate-config"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("furuta: ok"), std::string::npos);
  EXPECT_EQ(run({"validate-config", "ballcup"}).code, kOk);
}

TEST(Cli, ValidateConfigReportsBadFiles) {
  test::TempDir dir("cli_bad");
  {
    std::ofstream f(dir.file("bad.yaml"));
    f << "environment: furuta\nbogus: 1\n";
  }
  const Result r = run({"validate-config", dir.file("bad.yaml")});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"validate-config", dir.file("missing.yaml")}).code, kUsage);
}

TEST(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(run({"sim2sim", "--no-such-flag"}).code, kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run({}).code, kUsage);
  EXPECT_EQ(run({"eval"}).code, kUsage);
  EXPECT_EQ(run({"bayrn", "run", "--seed", "abc"}).code, kUsage);
}

TEST(Cli, HelpExitsWithZero) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("sim2sim"), std::string::npos);
}

TEST(Cli, RuntimeFailuresExitWithTwo) {
  test::TempDir dir("cli_rt");
  EXPECT_EQ(run({"eval", "--policy-file", dir.file("none.txt")}).code, kRuntime);
  EXPECT_EQ(run({"export-gp-grid", "--run-record", dir.file("none.jsonl")}).code, kRuntime);
}

TEST(Cli, Sim2SimIsByteIdenticalAcrossReruns) {
  test::TempDir dir("cli_sim");
  const std::string cfg = tiny_sim2sim(dir);
  const Result a = run({"sim2sim", "--config", cfg, "--seed", "7", "--out", dir.file("a"), "--quiet"});
  const Result b = run({"sim2sim", "--config", cfg, "--seed", "7", "--out", dir.file("b"), "--quiet"});
  ASSERT_EQ(a.code, kOk) << a.err;
  ASSERT_EQ(b.code, kOk) << b.err;
  const std::string ra = test::read_file(dir.file("a/run.jsonl"));
  EXPECT_FALSE(ra.empty());
  EXPECT_EQ(ra, test::read_file(dir.file("b/run.jsonl")));
  EXPECT_NE(a.out.find("recovery m_p.mean"), std::string::npos);
  EXPECT_NE(a.out.find("recovery m_r.mean"), std::string::npos);
}

TEST(Cli, EvalReproducesTheLoggedReturn) {
  test::TempDir dir("cli_eval");
  const std::string cfg = tiny_sim2sim(dir);
  ASSERT_EQ(run({"nominal", "run", "--config", cfg, "--out", dir.file("n"), "--quiet"}).code, kOk);
  const Result run_out = run({"nominal", "run", "--config", cfg, "--out", dir.file("m"), "--quiet"});
  const Result ev = run({"eval", "--policy-file", dir.file("n/policy.txt")});
  ASSERT_EQ(ev.code, kOk) << ev.err;
  std::string logged;
  for (const auto& l : lines(run_out.out)) {
    if (l.rfind("J_hat ", 0) == 0) logged = l;
  }
  EXPECT_FALSE(logged.empty());
  EXPECT_EQ(lines(ev.out).at(0), logged);
}

TEST(Cli, ExportGpGridWritesResolutionSquaredRows) {
  test::TempDir dir("cli_grid");
  const std::string cfg = tiny_sim2sim(dir);
  ASSERT_EQ(run({"sim2sim", "--config", cfg, "--out", dir.file("s"), "--quiet"}).code, kOk);
  const Result r = run({"export-gp-grid", "--run-record", dir.file("s/run.jsonl"), "--dims", "0,1",
                        "--resolution", "7", "--out", dir.file("grid.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto rows = lines(test::read_file(dir.file("grid.csv")));
  ASSERT_EQ(rows.size(), 1u + 49u);
  EXPECT_EQ(rows[0], "phi1,phi2,mean,std");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::count(rows[i].begin(), rows[i].end(), ','), 3) << rows[i];
  }
  // only two coordinates are searched in this config
  EXPECT_EQ(run({"export-gp-grid", "--run-record", dir.file("s/run.jsonl"), "--dims", "0,2"}).code, kUsage);
}

}  // namespace
}  // namespace bayrn::tools
