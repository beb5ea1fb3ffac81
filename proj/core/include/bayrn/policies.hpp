#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayrn/rng.hpp"

namespace bayrn {

enum class PolicyKind { energy_balance, rbf };

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// Flat parameter vector tagged with the policy kind it belongs to.
struct PolicyParams {
  PolicyKind kind = PolicyKind::energy_balance;
  Eigen::VectorXd values;

  bool operator==(const PolicyParams& o) const {
    return kind == o.kind && values.size() == o.values.size() && values == o.values;
  }
};

/// Deterministic parameterized policy. Policies are immutable; act() is pure.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyKind kind() const = 0;
  virtual std::size_t param_dim() const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t action_dim() const = 0;

  /// Writes the clamped action for `input` into `action`.
  /// Throws DimensionMismatch on any size mismatch.
  virtual void act(std::span<const double> input, std::span<const double> params,
                   std::span<double> action) const = 0;

  /// Convenience wrapper for single-output policies.
  double act1(std::span<const double> input, std::span<const double> params) const;

 protected:
  void check_dims(std::span<const double> input, std::span<const double> params,
                  std::span<double> action) const;
};

/// Time-indexed policy: normalized Gaussian basis functions over t / T.
class RbfPolicy final : public Policy {
 public:
  struct Config {
    std::size_t num_basis = 16;
    std::size_t num_outputs = 1;
    double output_scale = 1.0;
    double max_action = 1.0;

    bool operator==(const Config&) const = default;
  };

  explicit RbfPolicy(Config cfg);

  PolicyKind kind() const override { return PolicyKind::rbf; }
  std::size_t param_dim() const override { return cfg_.num_basis * cfg_.num_outputs; }
  std::size_t input_dim() const override { return 1; }
  std::size_t action_dim() const override { return cfg_.num_outputs; }

  void act(std::span<const double> input, std::span<const double> params,
           std::span<double> action) const override;

  /// Normalized basis activations at phase t in [0, 1]; they sum to one.
  void activations(double t, std::span<double> out) const;
  /// Unclamped readout, linear in params.
  double readout(double t, std::span<const double> params, std::size_t output) const;

  double center(std::size_t i) const;
  double bandwidth() const { return bandwidth_; }

 private:
  Config cfg_;
  double bandwidth_;
};

/// Furuta swing-up: energy pumping far from upright, linear state feedback
/// near upright. Parameters are [k_e, E_ref, K_theta, K_alpha, K_theta_dot,
/// K_alpha_dot], each multiplied by the configured scale before use.
class EnergyBalancePolicy final : public Policy {
 public:
  static constexpr std::size_t kParamDim = 6;

  struct Config {
    double switch_angle = 0.35;     ///< |alpha - pi| below which the balancer acts [rad]
    double energy_omega_sq = 114.0; ///< squared small-angle pendulum frequency [1/s^2]
    std::array<double, kParamDim> param_scale{1, 1, 1, 1, 1, 1};
    double max_action = 8.0;

    bool operator==(const Config&) const = default;
  };

  explicit EnergyBalancePolicy(Config cfg);

  PolicyKind kind() const override { return PolicyKind::energy_balance; }
  std::size_t param_dim() const override { return kParamDim; }
  std::size_t input_dim() const override { return 6; }
  std::size_t action_dim() const override { return 1; }

  void act(std::span<const double> input, std::span<const double> params,
           std::span<double> action) const override;

  /// Normalized pendulum energy: 0 hanging at rest, 2 upright at rest.
  double normalized_energy(double cos_alpha, double alpha_dot) const;

 private:
  Config cfg_;
};

/// theta + eps with eps ~ N(0, sigma^2 I). Throws on sigma < 0.
Eigen::VectorXd perturb(const Eigen::VectorXd& theta, double sigma, Rng& rng);

}  // namespace bayrn
