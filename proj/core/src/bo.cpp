#include "bayrn/bo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "bayrn/errors.hpp"

namespace bayrn {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

struct Point {
  Eigen::VectorXd u;
  double value;
};

Point pattern_search(const UnitObjective& f, Point p, const std::vector<bool>& fixed,
                     const SearchOptions& opts) {
  const Eigen::Index d = p.u.size();
  double step = opts.initial_step;
  while (step >= opts.min_step) {
    bool improved = false;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (fixed[static_cast<std::size_t>(k)]) continue;
      for (double dir : {1.0, -1.0}) {
        Eigen::VectorXd q = p.u;
        q[k] = std::clamp(q[k] + dir * step, 0.0, 1.0);
        if (q[k] == p.u[k]) continue;
        const double v = f(q);
        if (v > p.value) {
          p = {std::move(q), v};
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  // Golden-section polish inside the last bracket of each coordinate.
  constexpr double kInvPhi = 0.61803398874989484820;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (fixed[static_cast<std::size_t>(k)]) continue;
    double a = std::max(0.0, p.u[k] - 2.0 * step);
    double b = std::min(1.0, p.u[k] + 2.0 * step);
    Eigen::VectorXd q = p.u;
    auto eval = [&](double x) {
      q[k] = x;
      return f(q);
    };
    double c = b - kInvPhi * (b - a), e = a + kInvPhi * (b - a);
    double fc = eval(c), fe = eval(e);
    for (int it = 0; it < 40; ++it) {
      if (fc >= fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - kInvPhi * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + kInvPhi * (b - a);
        fe = eval(e);
      }
    }
    const double x = fc >= fe ? c : e;
    const double v = eval(x);
    if (v > p.value) {
      p.u[k] = x;
      p.value = v;
    }
  }
  return p;
}

std::vector<bool> degenerate_mask(const Box& box) {
  std::vector<bool> fixed(static_cast<std::size_t>(box.dim()));
  for (Eigen::Index k = 0; k < box.dim(); ++k) fixed[static_cast<std::size_t>(k)] = box.is_degenerate(k);
  return fixed;
}

}  // namespace

double expected_improvement(double mu, double sigma, double f_best, double offset) {
  if (sigma < 0.0) throw Error("expected_improvement: sigma must be non-negative");
  const double diff = mu - f_best - offset;
  if (sigma == 0.0) return std::max(diff, 0.0);
  const double z = diff / sigma;
  return std::max(0.0, diff * normal_cdf(z) + sigma * normal_pdf(z));
}

Eigen::VectorXd maximize_unit(const UnitObjective& f, const std::vector<bool>& fixed,
                              const SearchOptions& opts, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(fixed.size());
  if (opts.n_candidates < 1) throw Error("search: need at least one candidate");

  std::vector<Point> cands;
  cands.reserve(opts.n_candidates);
  for (std::size_t c = 0; c < opts.n_candidates; ++c) {
    Eigen::VectorXd u(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double x = uniform(rng, 0.0, 1.0);
      u[k] = fixed[static_cast<std::size_t>(k)] ? 0.0 : x;
    }
    const double v = f(u);
    cands.push_back({std::move(u), v});
  }

  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cands[a].value > cands[b].value; });

  const std::size_t n_refine = std::min(opts.n_refine, cands.size());
  Point best = cands[order.front()];
  for (std::size_t r = 0; r < n_refine; ++r) {
    Point p = pattern_search(f, cands[order[r]], fixed, opts);
    if (p.value > best.value) best = std::move(p);
  }
  return best.u;
}

double acquisition_value(const GpModel& model, const Eigen::VectorXd& unit, double offset) {
  const GpPrediction p = model.predict_unit(unit);
  return expected_improvement(p.mean, std::sqrt(p.var), model.best_standardized_target(), offset);
}

Eigen::VectorXd maximize_acquisition(const GpModel& model, const SearchOptions& opts, Rng& rng) {
  const auto u = maximize_unit(
      [&](const Eigen::VectorXd& x) { return acquisition_value(model, x, opts.ei_offset); },
      degenerate_mask(model.box()), opts, rng);
  return denormalize_phi(model.box(), u);
}

Eigen::VectorXd map_phi(const GpModel& model, const SearchOptions& opts, Rng& rng) {
  const auto u = maximize_unit([&](const Eigen::VectorXd& x) { return model.predict_unit(x).mean; },
                               degenerate_mask(model.box()), opts, rng);
  return denormalize_phi(model.box(), u);
}

std::vector<GridPoint> gp_grid(const GpModel& model, Eigen::Index i, Eigen::Index j,
                               std::size_t resolution, const Eigen::VectorXd& anchor) {
  const Box& box = model.box();
  if (i < 0 || j < 0 || i >= box.dim() || j >= box.dim() || i == j) {
    throw Error("gp_grid: need two distinct coordinates below " + std::to_string(box.dim()));
  }
  if (resolution < 1) throw Error("gp_grid: resolution must be positive");
  if (anchor.size() != box.dim()) {
    throw DimensionMismatch("gp_grid anchor", static_cast<std::size_t>(box.dim()),
                            static_cast<std::size_t>(anchor.size()));
  }
  const auto axis = [&](Eigen::Index k, std::size_t n) {
    if (resolution == 1) return 0.5 * (box.lower[k] + box.upper[k]);
    const double t = static_cast<double>(n) / static_cast<double>(resolution - 1);
    return box.lower[k] + t * (box.upper[k] - box.lower[k]);
  };

  std::vector<GridPoint> out;
  out.reserve(resolution * resolution);
  Eigen::VectorXd phi = anchor;
  for (std::size_t a = 0; a < resolution; ++a) {
    for (std::size_t b = 0; b < resolution; ++b) {
      phi[i] = axis(i, a);
      phi[j] = axis(j, b);
      const GpPrediction p = model.posterior(phi);
      out.push_back({phi[i], phi[j], p.mean, std::sqrt(p.var)});
    }
  }
  return out;
}

}  // namespace bayrn
