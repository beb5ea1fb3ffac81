#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bayrn/gp.hpp"
#include "bayrn/rng.hpp"

namespace bayrn {

/// (mu - f_best) Phi(z) + sigma phi(z) with z = (mu - f_best) / sigma, and
/// max(mu - f_best, 0) at sigma = 0. `offset` is subtracted from mu - f_best.
/// Throws on sigma < 0.
double expected_improvement(double mu, double sigma, double f_best, double offset = 0.0);

struct SearchOptions {
  std::size_t n_candidates = 1024;
  std::size_t n_refine = 8;
  double initial_step = 0.05;  ///< pattern-search step on the unit cube
  double min_step = 1e-4;
  double ei_offset = 0.0;

  bool operator==(const SearchOptions&) const = default;
};

using UnitObjective = std::function<double(const Eigen::VectorXd&)>;

/// Multi-start maximization over the unit cube: uniform candidates, the best
/// few refined by pattern search and a golden-section polish per coordinate.
/// Coordinates flagged in `fixed` stay at zero. Ties go to the lowest
/// candidate index.
Eigen::VectorXd maximize_unit(const UnitObjective& f, const std::vector<bool>& fixed,
                              const SearchOptions& opts, Rng& rng);

/// EI on the standardized scale against the best observed target.
double acquisition_value(const GpModel& model, const Eigen::VectorXd& unit, double offset = 0.0);

/// Next phi to evaluate: argmax of EI over the model's box.
Eigen::VectorXd maximize_acquisition(const GpModel& model, const SearchOptions& opts, Rng& rng);

/// Argmax of the posterior mean over the model's box.
Eigen::VectorXd map_phi(const GpModel& model, const SearchOptions& opts, Rng& rng);

struct GridPoint {
  double x = 0.0;
  double y = 0.0;
  double mean = 0.0;
  double std = 0.0;
};

/// Posterior mean and std on a resolution x resolution grid over coordinates
/// (i, j) of the box; the remaining coordinates are held at `anchor`. Rows are
/// ordered with the j coordinate varying fastest.
std::vector<GridPoint> gp_grid(const GpModel& model, Eigen::Index i, Eigen::Index j,
                               std::size_t resolution, const Eigen::VectorXd& anchor);

}  // namespace bayrn
