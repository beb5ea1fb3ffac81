#include "bayrn/policies.hpp"

#include <algorithm>
#include <cmath>

#include "bayrn/errors.hpp"

namespace bayrn {

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::energy_balance: return "energy_balance";
    case PolicyKind::rbf: return "rbf";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "energy_balance") return PolicyKind::energy_balance;
  if (name == "rbf") return PolicyKind::rbf;
  throw Error("unknown policy kind '" + name + "'");
}

double Policy::act1(std::span<const double> input, std::span<const double> params) const {
  double a = 0.0;
  act(input, params, std::span<double>(&a, 1));
  return a;
}

void Policy::check_dims(std::span<const double> input, std::span<const double> params,
                        std::span<double> action) const {
  if (params.size() != param_dim()) throw DimensionMismatch("policy params", param_dim(), params.size());
  if (input.size() != input_dim()) throw DimensionMismatch("policy input", input_dim(), input.size());
  if (action.size() != action_dim()) throw DimensionMismatch("policy action", action_dim(), action.size());
}

// ---------------------------------------------------------------------------

RbfPolicy::RbfPolicy(Config cfg) : cfg_(cfg) {
  if (cfg_.num_basis < 2) throw Error("rbf policy needs at least two basis functions");
  if (cfg_.num_outputs < 1) throw Error("rbf policy needs at least one output");
  // adjacent Gaussians cross at activation 0.5
  const double spacing = 1.0 / static_cast<double>(cfg_.num_basis - 1);
  bandwidth_ = 0.5 * spacing / std::sqrt(2.0 * std::log(2.0));
}

double RbfPolicy::center(std::size_t i) const {
  return static_cast<double>(i) / static_cast<double>(cfg_.num_basis - 1);
}

void RbfPolicy::activations(double t, std::span<double> out) const {
  if (out.size() != cfg_.num_basis) throw DimensionMismatch("rbf activations", cfg_.num_basis, out.size());
  const double tc = std::clamp(t, 0.0, 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < cfg_.num_basis; ++i) {
    const double z = (tc - center(i)) / bandwidth_;
    out[i] = std::exp(-0.5 * z * z);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
}

double RbfPolicy::readout(double t, std::span<const double> params, std::size_t output) const {
  if (params.size() != param_dim()) throw DimensionMismatch("policy params", param_dim(), params.size());
  std::vector<double> basis(cfg_.num_basis);
  activations(t, basis);
  const auto row = params.subspan(output * cfg_.num_basis, cfg_.num_basis);
  double acc = 0.0;
  for (std::size_t i = 0; i < cfg_.num_basis; ++i) acc += basis[i] * row[i];
  return cfg_.output_scale * acc;
}

void RbfPolicy::act(std::span<const double> input, std::span<const double> params,
                    std::span<double> action) const {
  check_dims(input, params, action);
  // small fixed-size buffer; 16 bases in every shipped config
  double stack[64];
  std::vector<double> heap;
  std::span<double> basis;
  if (cfg_.num_basis <= 64) {
    basis = std::span<double>(stack, cfg_.num_basis);
  } else {
    heap.resize(cfg_.num_basis);
    basis = heap;
  }
  activations(input[0], basis);
  for (std::size_t k = 0; k < cfg_.num_outputs; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < cfg_.num_basis; ++i) acc += basis[i] * params[k * cfg_.num_basis + i];
    action[k] = std::clamp(cfg_.output_scale * acc, -cfg_.max_action, cfg_.max_action);
  }
}

// ---------------------------------------------------------------------------

EnergyBalancePolicy::EnergyBalancePolicy(Config cfg) : cfg_(cfg) {
  if (!(cfg_.energy_omega_sq > 0.0)) throw Error("energy_omega_sq must be positive");
  if (!(cfg_.switch_angle > 0.0)) throw Error("switch_angle must be positive");
}

double EnergyBalancePolicy::normalized_energy(double cos_alpha, double alpha_dot) const {
  return 0.5 * alpha_dot * alpha_dot / cfg_.energy_omega_sq + (1.0 - cos_alpha);
}

void EnergyBalancePolicy::act(std::span<const double> input, std::span<const double> params,
                              std::span<double> action) const {
  check_dims(input, params, action);
  const double sin_th = input[0], cos_th = input[1];
  const double sin_al = input[2], cos_al = input[3];
  const double th_dot = input[4], al_dot = input[5];
  const auto& sc = cfg_.param_scale;

  // pendulum angle relative to upright, in (-pi, pi]
  const double up_err = std::atan2(-sin_al, -cos_al);
  double u = 0.0;
  if (std::fabs(up_err) > cfg_.switch_angle) {
    const double k_e = sc[0] * params[0];
    const double e_ref = sc[1] * params[1];
    const double energy = normalized_energy(cos_al, al_dot);
    // sign(0) = +1 so the law also starts the pendulum from rest
    const double dir = al_dot * cos_al < 0.0 ? -1.0 : 1.0;
    u = -k_e * (e_ref - energy) * dir;
  } else {
    const double th = std::atan2(sin_th, cos_th);
    u = sc[2] * params[2] * th + sc[3] * params[3] * up_err + sc[4] * params[4] * th_dot +
        sc[5] * params[5] * al_dot;
  }
  action[0] = std::clamp(u, -cfg_.max_action, cfg_.max_action);
}

// ---------------------------------------------------------------------------

Eigen::VectorXd perturb(const Eigen::VectorXd& theta, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw Error("perturb: sigma must be non-negative");
  Eigen::VectorXd out = theta;
  if (sigma == 0.0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += sigma * standard_normal(rng);
  return out;
}

}  // namespace bayrn
