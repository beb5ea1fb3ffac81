#include "bayrn/environment.hpp"

#include <cmath>

#include "bayrn/errors.hpp"

namespace bayrn {

double discounted_return(std::span<const double> rewards, double gamma) {
  double ret = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    ret += weight * r;
    weight *= gamma;
  }
  return ret;
}

Rollout run_episode(Environment& env, const Policy& policy, std::span<const double> params,
                    const DomainParams& xi, Rng& rng, double gamma) {
  if (policy.input_dim() != env.input_dim()) {
    throw DimensionMismatch("policy input vs environment", env.input_dim(), policy.input_dim());
  }
  env.reset(xi, rng);
  const std::size_t T = env.horizon();
  Rollout out;
  out.actions.reserve(T * policy.action_dim());
  out.rewards.reserve(T);
  std::vector<double> input(env.input_dim());
  std::vector<double> action(policy.action_dim());
  for (std::size_t t = 0; t < T; ++t) {
    env.policy_input(input);
    policy.act(input, params, action);
    out.actions.insert(out.actions.end(), action.begin(), action.end());
    out.rewards.push_back(env.step(action));
  }
  out.ret = discounted_return(out.rewards, gamma);
  return out;
}

// ---------------------------------------------------------------------------

void FurutaEnv::reset(const DomainParams& xi, Rng& rng) {
  xi_ = furuta::FurutaDomainParams::from(xi);
  state_ = furuta::initial_state(rng, cfg_.init_jitter_std);
}

void FurutaEnv::policy_input(std::span<double> out) const {
  const auto obs = furuta::observe(state_);
  std::copy(obs.begin(), obs.end(), out.begin());
}

double FurutaEnv::step(std::span<const double> action) {
  const double a = std::clamp(action[0], -cfg_.max_voltage, cfg_.max_voltage);
  const double r = furuta::reward(state_, a, cfg_.reward);
  state_ = furuta::step(state_, a, xi_, cfg_.dt, cfg_.max_voltage);
  return r;
}

// ---------------------------------------------------------------------------

void BallCupEnv::reset(const DomainParams& xi, Rng& rng) {
  xi_ = ballcup::BallCupDomainParams::from(xi);
  state_ = ballcup::rest_state(xi_, cfg_.model);
  if (cfg_.init_jitter_std > 0.0) {
    state_.ball_x += cfg_.init_jitter_std * standard_normal(rng);
    state_.ball_vx += cfg_.init_jitter_std * standard_normal(rng);
  }
  tracker_ = ballcup::ContactTracker(cfg_.cup);
  tracker_.observe(state_);
  t_ = 0;
  start_x_ = state_.cup_x;
  deviation_sum_ = 0.0;
}

void BallCupEnv::policy_input(std::span<double> out) const {
  out[0] = cfg_.horizon > 1
               ? static_cast<double>(t_) / static_cast<double>(cfg_.horizon - 1)
               : 0.0;
}

double BallCupEnv::step(std::span<const double> action) {
  state_ = ballcup::step(state_, action[0], xi_, cfg_.model, cfg_.dt);
  tracker_.observe(state_);
  const double dev = state_.cup_x - start_x_;
  deviation_sum_ += dev * dev;
  ++t_;
  if (t_ < cfg_.horizon) return 0.0;

  const double d = tracker_.min_opening_distance();
  const double s = cfg_.proximity_scale;
  return ballcup::outcome_reward(tracker_.outcome()) +
         cfg_.proximity_weight * std::exp(-0.5 * d * d / (s * s)) -
         cfg_.deviation_weight * deviation_sum_ / static_cast<double>(cfg_.horizon);
}

}  // namespace bayrn
