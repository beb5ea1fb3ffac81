#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bayrn/domains.hpp"

namespace bayrn {

/// Matern 5/2 hyperparameters; lengthscales act on unit-cube inputs.
struct GpHyperparams {
  double signal_var = 1.0;
  Eigen::VectorXd lengthscales;
  double noise_var = 1e-2;

  void validate() const;
};

/// sigma_f^2 (1 + sqrt5 d + 5 d^2 / 3) exp(-sqrt5 d), d the lengthscale-scaled
/// Euclidean distance.
double matern52(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const GpHyperparams& hyp);

/// History of (phi, J_hat) observations inside a fixed box.
class BoDataset {
 public:
  explicit BoDataset(Box box) : box_(std::move(box)) {}

  /// Throws OutOfBox if phi is outside the box and Error on a non-finite target.
  void add(const Eigen::VectorXd& phi, double target);

  std::size_t size() const { return targets_.size(); }
  const Box& box() const { return box_; }
  const std::vector<Eigen::VectorXd>& inputs() const { return inputs_; }
  const std::vector<double>& targets() const { return targets_; }

  /// Row i is normalize_phi(inputs()[i]).
  Eigen::MatrixXd normalized_inputs() const;

  struct Standardization {
    double mean = 0.0;
    double scale = 1.0;
  };
  /// Sample mean and std (guarded at 1e-8) for two or more rows; identity below.
  Standardization standardization() const;

 private:
  Box box_;
  std::vector<Eigen::VectorXd> inputs_;
  std::vector<double> targets_;
};

struct GpFitOptions {
  // log-space search box for the marginal-likelihood fit
  double signal_var_min = 1e-2, signal_var_max = 1e2;
  double lengthscale_min = 1e-2, lengthscale_max = 1e1;
  double noise_var_min = 1e-4, noise_var_max = 1e1;
  std::size_t grid_signal = 5, grid_lengthscale = 8, grid_noise = 7;
  std::size_t refine_sweeps = 3;
  double jitter_start = 1e-10;
  double jitter_max = 1e-4;

  bool operator==(const GpFitOptions&) const = default;
};

struct GpPrediction {
  double mean = 0.0;
  double var = 0.0;
};

/// Zero-mean GP on normalized inputs and standardized targets.
class GpModel {
 public:
  /// Marginal-likelihood fit of the hyperparameters (log-space grid plus
  /// coordinate-wise golden-section refinement). Requires two or more rows.
  static GpModel fit(const BoDataset& data, const GpFitOptions& opts = {});
  /// Conditions on data with fixed hyperparameters. Requires one or more rows.
  static GpModel condition(const BoDataset& data, const GpHyperparams& hyp,
                           const GpFitOptions& opts = {});

  /// Latent f at unit-cube input u, standardized scale.
  GpPrediction predict_unit(const Eigen::VectorXd& u) const;
  /// Latent f at phi in original units and target scale.
  GpPrediction posterior(const Eigen::VectorXd& phi) const;

  const GpHyperparams& hyperparams() const { return hyp_; }
  const Box& box() const { return box_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }
  BoDataset::Standardization standardization() const { return std_; }
  /// Largest standardized training target.
  double best_standardized_target() const { return y_.maxCoeff(); }
  std::size_t size() const { return static_cast<std::size_t>(y_.size()); }

 private:
  GpModel() = default;

  Box box_;
  GpHyperparams hyp_;
  BoDataset::Standardization std_;
  Eigen::MatrixXd X_;  // n x d, unit cube
  Eigen::VectorXd y_;  // standardized
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

/// Log marginal likelihood of standardized targets y at unit inputs X, or
/// -infinity when the kernel matrix cannot be factorized.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const GpHyperparams& hyp, const GpFitOptions& opts = {});

}  // namespace bayrn
