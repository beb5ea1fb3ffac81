#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayrn/domains.hpp"
#include "bayrn/environment.hpp"
#include "bayrn/policies.hpp"

namespace bayrn {

enum class PolOptAlgorithm { cem, power };

const char* to_string(PolOptAlgorithm a);
PolOptAlgorithm polopt_algorithm_from_string(const std::string& name);

struct PolOptConfig {
  PolOptAlgorithm algorithm = PolOptAlgorithm::power;
  std::size_t n_pop = 100;
  std::size_t n_is = 10;  ///< PoWER importance samples
  std::size_t n_iter = 20;
  double sigma_init = 0.2617993877991494;  ///< pi / 12
  std::size_t rollouts_per_candidate = 1;
  double discount = 1.0;
  double elite_frac = 0.1;  ///< CEM only
  double min_std = 1e-3;    ///< CEM std floor
  /// Fresh-domain rollouts used to score the returned parameters.
  std::size_t eval_rollouts = 5;
  /// Retrain once with a new seed when the simulated return ends up below this.
  double retrain_threshold = -std::numeric_limits<double>::infinity();
  std::size_t threads = 1;

  void validate() const;
  bool operator==(const PolOptConfig&) const = default;
};

/// Parameters of one evaluated candidate and its (mean) return.
struct Candidate {
  Eigen::VectorXd params;
  double ret = 0.0;
};

struct RolloutBatch {
  std::size_t generation = 0;
  std::vector<Candidate> rollouts;
};

/// PoWER update with return-weighted averaging of the n_is best rollouts of
/// the whole history. Perturbations are taken relative to `theta`; returns are
/// shifted by the history minimum when that minimum is negative.
/// Throws on an empty history.
Eigen::VectorXd power_update(const Eigen::VectorXd& theta, std::span<const Candidate> history,
                             std::size_t n_is);

/// Elite-set Gaussian refit, std floored at `min_std`. Throws on fewer than
/// two candidates.
struct GaussianSearch {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};
GaussianSearch cem_update(std::span<const Candidate> population, double elite_frac, double min_std);

/// Everything the lower-level problem needs: how to build simulators, where
/// domain parameters come from, and which policy is optimized from where.
struct TrainingProblem {
  EnvFactory make_env;
  DomainSampler sampler;
  std::shared_ptr<const Policy> policy;
  Eigen::VectorXd init;
};

struct GenerationStats {
  std::size_t generation = 0;
  double best_return = 0.0;  ///< best candidate return so far
  double mean_return = 0.0;  ///< mean over this generation
};

struct TrainResult {
  Eigen::VectorXd params;
  double sim_return = 0.0;
  std::vector<GenerationStats> curve;
  std::uint64_t seed = 0;  ///< seed of the run that produced `params`
  bool retrained = false;
};

/// Mean return of `params` over `rollouts` episodes, each on a fresh domain
/// draw from stream `stream` of `seed`.
double evaluate_params(const TrainingProblem& problem, Environment& env,
                       const Eigen::VectorXd& params, std::size_t rollouts, double gamma,
                       std::uint64_t seed, std::uint64_t stream);

/// Solves the lower-level problem. Deterministic in (problem, cfg, seed) and
/// independent of cfg.threads.
TrainResult train(const TrainingProblem& problem, const PolOptConfig& cfg, std::uint64_t seed);

}  // namespace bayrn
