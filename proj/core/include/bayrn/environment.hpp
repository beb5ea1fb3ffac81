#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "bayrn/ballcup.hpp"
#include "bayrn/domains.hpp"
#include "bayrn/furuta.hpp"
#include "bayrn/policies.hpp"
#include "bayrn/rng.hpp"

namespace bayrn {

/// Episodic simulator. reset() instantiates the physics from one DomainParams
/// draw; the episode then runs for horizon() steps.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual void reset(const DomainParams& xi, Rng& rng) = 0;
  virtual std::size_t horizon() const = 0;
  virtual std::size_t input_dim() const = 0;
  /// Policy input at the current step (observation or normalized time).
  virtual void policy_input(std::span<double> out) const = 0;
  /// Applies the action for one control step and returns its reward.
  virtual double step(std::span<const double> action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

/// One episode: time-indexed actions and rewards plus the discounted return.
struct Rollout {
  std::vector<double> actions;
  std::vector<double> rewards;
  double ret = 0.0;
};

/// sum_{t=0}^{T-1} gamma^t r_t
double discounted_return(std::span<const double> rewards, double gamma);

Rollout run_episode(Environment& env, const Policy& policy, std::span<const double> params,
                    const DomainParams& xi, Rng& rng, double gamma);

struct FurutaEnvConfig {
  double dt = 0.01;
  std::size_t horizon = 600;
  double max_voltage = 8.0;
  double init_jitter_std = 0.0;
  furuta::RewardWeights reward;

  bool operator==(const FurutaEnvConfig&) const = default;
};

class FurutaEnv final : public Environment {
 public:
  explicit FurutaEnv(FurutaEnvConfig cfg) : cfg_(cfg) {}

  void reset(const DomainParams& xi, Rng& rng) override;
  std::size_t horizon() const override { return cfg_.horizon; }
  std::size_t input_dim() const override { return 6; }
  void policy_input(std::span<double> out) const override;
  double step(std::span<const double> action) override;

  const furuta::FurutaState& state() const { return state_; }
  const furuta::FurutaDomainParams& params() const { return xi_; }

 private:
  FurutaEnvConfig cfg_;
  furuta::FurutaDomainParams xi_;
  furuta::FurutaState state_;
};

struct BallCupEnvConfig {
  double dt = 0.002;
  std::size_t horizon = 1750;
  double init_jitter_std = 0.0;
  ballcup::BallCupModel model;
  ballcup::CupGeometry cup;
  /// Bonus exp(-d^2 / (2 s^2)) on the closest approach d of the ball to the
  /// cup opening, added to the final reward during training.
  double proximity_weight = 0.0;
  double proximity_scale = 0.1;
  /// Quadratic penalty on the mean squared cup displacement from its start.
  double deviation_weight = 0.0;

  bool operator==(const BallCupEnvConfig&) const = default;
};

/// Sparse reward: zero until the last step, which pays the ternary outcome
/// plus the configured shaping terms.
class BallCupEnv final : public Environment {
 public:
  explicit BallCupEnv(BallCupEnvConfig cfg) : cfg_(cfg), tracker_(cfg.cup) {}

  void reset(const DomainParams& xi, Rng& rng) override;
  std::size_t horizon() const override { return cfg_.horizon; }
  std::size_t input_dim() const override { return 1; }
  void policy_input(std::span<double> out) const override;
  double step(std::span<const double> action) override;

  const ballcup::BallCupState& state() const { return state_; }
  ballcup::Outcome outcome() const { return tracker_.outcome(); }

 private:
  BallCupEnvConfig cfg_;
  ballcup::BallCupDomainParams xi_;
  ballcup::BallCupState state_;
  ballcup::ContactTracker tracker_;
  std::size_t t_ = 0;
  double start_x_ = 0.0;
  double deviation_sum_ = 0.0;
};

}  // namespace bayrn
