#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "bayrn/domains.hpp"
#include "bayrn/environment.hpp"
#include "bayrn/policies.hpp"
#include "bayrn/polopt.hpp"

namespace bayrn::test {

// Outputs its parameters as the action.
class ParamPolicy final : public Policy {
 public:
  explicit ParamPolicy(std::size_t dim) : dim_(dim) {}
  PolicyKind kind() const override { return PolicyKind::rbf; }
  std::size_t param_dim() const override { return dim_; }
  std::size_t input_dim() const override { return 1; }
  std::size_t action_dim() const override { return dim_; }
  void act(std::span<const double> input, std::span<const double> params,
           std::span<double> action) const override {
    check_dims(input, params, action);
    std::copy(params.begin(), params.end(), action.begin());
  }

 private:
  std::size_t dim_;
};

// One-step episode paying minus the squared distance to `optimum`, with the
// optimum shifted by the domain parameter "shift".
class QuadraticEnv final : public Environment {
 public:
  explicit QuadraticEnv(Eigen::VectorXd optimum) : optimum_(std::move(optimum)) {}
  void reset(const DomainParams& xi, Rng&) override { shift_ = xi.find("shift").value_or(0.0); }
  std::size_t horizon() const override { return 1; }
  std::size_t input_dim() const override { return 1; }
  void policy_input(std::span<double> out) const override { out[0] = 0.0; }
  double step(std::span<const double> action) override {
    double cost = 0.0;
    for (std::size_t i = 0; i < action.size(); ++i) {
      const double e = action[i] - optimum_[static_cast<Eigen::Index>(i)] - shift_;
      cost += e * e;
    }
    return -cost;
  }

 private:
  Eigen::VectorXd optimum_;
  double shift_ = 0.0;
};

inline TrainingProblem quadratic_problem(const Eigen::VectorXd& optimum, DomainParams xi = {}) {
  return {[optimum] { return std::make_unique<QuadraticEnv>(optimum); }, DomainSampler(std::move(xi)),
          std::make_shared<ParamPolicy>(static_cast<std::size_t>(optimum.size())),
          Eigen::VectorXd::Zero(optimum.size())};
}

}  // namespace bayrn::test
