#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bayrn/bo.hpp"
#include "bayrn/domains.hpp"
#include "bayrn/environment.hpp"
#include "bayrn/gp.hpp"
#include "bayrn/policies.hpp"
#include "bayrn/polopt.hpp"

namespace bayrn {

enum class EnvKind { furuta, ballcup };

const char* to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::energy_balance;
  std::vector<double> init;
  EnergyBalancePolicy::Config energy_balance;
  RbfPolicy::Config rbf;

  bool operator==(const PolicyConfig&) const = default;
};

struct BayrnSettings {
  std::size_t n_init = 5;
  std::size_t n_iter_max = 15;
  std::size_t n_tau = 5;
  double success_threshold = 375.0;
  /// Train every candidate of a run from the same seed, so that differences
  /// in target return reflect phi rather than optimizer noise.
  bool common_training_seed = true;
  GpFitOptions gp;
  SearchOptions acquisition;

  bool operator==(const BayrnSettings&) const = default;
};

struct ExperimentConfig {
  EnvKind environment = EnvKind::furuta;
  std::uint64_t seed = 0;
  std::string output_dir = "runs";
  /// Nominal values and clamps of every domain parameter.
  DomainSpecTable domain;
  /// The search space Phi.
  std::vector<DistrSlot> randomization;
  /// Ground-truth overrides of nominal values for the target domain.
  std::vector<std::pair<std::string, double>> target;
  FurutaEnvConfig furuta;
  BallCupEnvConfig ballcup;
  PolicyConfig policy;
  PolOptConfig polopt;
  BayrnSettings bayrn;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses YAML text. Throws ConfigError naming the offending key path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

std::string dump_config(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

/// Cross-field checks (also run by parse_config). Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Names of the configs compiled into the library ("furuta", "furuta_sim2sim",
/// "ballcup") and their YAML text.
std::vector<std::string> builtin_config_names();
std::string_view builtin_config_text(const std::string& name);
ExperimentConfig builtin_config(const std::string& name);

// Factories for the objects a config describes.
DistrSpace make_space(const ExperimentConfig& cfg);
DomainParams nominal_params(const ExperimentConfig& cfg);
DomainParams target_params(const ExperimentConfig& cfg);
EnvFactory make_env_factory(const ExperimentConfig& cfg);
std::shared_ptr<const Policy> make_policy(const ExperimentConfig& cfg);
Eigen::VectorXd initial_policy_params(const ExperimentConfig& cfg);

}  // namespace bayrn
