#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayrn/config.hpp"
#include "bayrn/run_record.hpp"

namespace bayrn {

/// Stand-in for the physical system: a simulator with fixed ground-truth
/// domain parameters.
struct TargetDomain {
  EnvKind kind = EnvKind::furuta;
  DomainParams xi;
};

TargetDomain make_target(const ExperimentConfig& cfg);

struct TargetEvaluation {
  double mean = 0.0;
  std::vector<double> returns;
};

/// Mean return of n_tau rollouts of the deterministic policy on the target.
TargetEvaluation evaluate_on_target(const Policy& policy, const Eigen::VectorXd& theta,
                                    const EnvFactory& make_env, const TargetDomain& target,
                                    std::size_t n_tau, double gamma, std::uint64_t seed);

struct RunOptions {
  /// Directory for config.yaml, run.jsonl, policy.txt and timing.jsonl.
  /// Empty keeps everything in memory.
  std::string out_dir;
  /// Continue from an interrupted run.jsonl in out_dir.
  bool resume = false;
  /// Progress messages; null for silence.
  std::ostream* log = nullptr;
};

struct RunResult {
  std::optional<Eigen::VectorXd> phi_star;
  PolicyParams policy;
  double j_sim = 0.0;
  double j_hat = 0.0;
  std::vector<double> target_returns;
  std::uint64_t eval_seed = 0;
  std::size_t iterations = 0;
  RunRecord record;
};

/// BayRn: n_init random phi, then EI steps until the target return reaches
/// the success threshold or n_iter_max steps were taken, then one final
/// training at the maximizer of the posterior mean.
RunResult run_bayrn(const ExperimentConfig& cfg, const TargetDomain& target,
                    const RunOptions& opts = {});

/// Uniform domain randomization with one random phi drawn from the box.
RunResult run_udr(const ExperimentConfig& cfg, const TargetDomain& target,
                  const RunOptions& opts = {});

/// Training on the nominal domain without randomization.
RunResult run_nominal(const ExperimentConfig& cfg, const TargetDomain& target,
                      const RunOptions& opts = {});

/// Seed sub-streams of a run.
namespace seed_stream {
inline constexpr std::uint64_t init_phi = 1000;
inline constexpr std::uint64_t init_train = 2000;
inline constexpr std::uint64_t init_eval = 3000;
inline constexpr std::uint64_t acquisition = 4000;
inline constexpr std::uint64_t bo_train = 5000;
inline constexpr std::uint64_t bo_eval = 6000;
inline constexpr std::uint64_t final_map = 7000;
inline constexpr std::uint64_t final_train = 7001;
inline constexpr std::uint64_t final_eval = 7002;
}  // namespace seed_stream

}  // namespace bayrn
