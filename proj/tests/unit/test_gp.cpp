#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "bayrn/errors.hpp"
#include "bayrn/gp.hpp"
#include "bayrn/rng.hpp"

namespace bayrn {
namespace {

Box unit_box(Eigen::Index d) { return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)}; }

GpHyperparams hyp(Eigen::Index d, double sf2, double ls, double sn2) {
  GpHyperparams h;
  h.signal_var = sf2;
  h.lengthscales = Eigen::VectorXd::Constant(d, ls);
  h.noise_var = sn2;
  return h;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

TEST(Matern52, UnitDistanceValue) {
  const GpHyperparams h = hyp(1, 1.0, 1.0, 1e-2);
  EXPECT_NEAR(matern52(vec({0.0}), vec({1.0}), h), 0.5240, 5e-5);
}

TEST(Matern52, MatchesTheClosedForm) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    GpHyperparams h = hyp(3, uniform(rng, 0.1, 5.0), 1.0, 1e-2);
    for (Eigen::Index k = 0; k < 3; ++k) h.lengthscales[k] = uniform(rng, 0.05, 3.0);
    Eigen::VectorXd x(3), y(3);
    for (Eigen::Index k = 0; k < 3; ++k) {
      x[k] = uniform(rng, -1.0, 2.0);
      y[k] = uniform(rng, -1.0, 2.0);
    }
    const double d = ((x - y).array() / h.lengthscales.array()).matrix().norm();
    const double s5 = std::sqrt(5.0);
    const double want = h.signal_var * (1.0 + s5 * d + 5.0 * d * d / 3.0) * std::exp(-s5 * d);
    EXPECT_NEAR(matern52(x, y, h), want, 1e-12);
  }
}

TEST(Matern52, PeaksAtZeroAndDecreasesAlongARay) {
  const GpHyperparams h = hyp(2, 2.0, 0.3, 1e-2);
  const Eigen::VectorXd x = vec({0.2, 0.4});
  const Eigen::VectorXd dir = vec({0.6, -0.8});
  EXPECT_EQ(matern52(x, x, h), 2.0);
  double prev = 2.0;
  for (int i = 1; i <= 100; ++i) {
    const double k = matern52(x, x + 0.02 * i * dir, h);
    EXPECT_LT(k, prev);
    EXPECT_GT(k, 0.0);
    prev = k;
  }
}

TEST(Matern52, GramMatrixIsPositiveSemidefinite) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const GpHyperparams h = hyp(3, uniform(rng, 0.1, 5.0), uniform(rng, 0.05, 2.0), 1e-2);
    const int n = 50;
    std::vector<Eigen::VectorXd> pts(n, Eigen::VectorXd(3));
    for (auto& p : pts) {
      for (Eigen::Index k = 0; k < 3; ++k) p[k] = uniform(rng, 0.0, 1.0);
    }
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) K(i, j) = matern52(pts[i], pts[j], h);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
  }
}

double smooth(double x) { return std::sin(2.0 * std::numbers::pi * x) + 0.5 * x; }

BoDataset smooth_data(int n, Rng& rng) {
  BoDataset data(unit_box(1));
  for (int i = 0; i < n; ++i) {
    const double x = uniform(rng, 0.0, 1.0);
    data.add(vec({x}), smooth(x));
  }
  return data;
}

TEST(GpModel, InterpolatesWithTinyNoise) {
  Rng rng(3);
  const BoDataset data = smooth_data(8, rng);
  const GpModel m = GpModel::condition(data, hyp(1, 1.0, 0.3, 1e-10));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const GpPrediction p = m.posterior(data.inputs()[i]);
    EXPECT_NEAR(p.mean, data.targets()[i], 1e-6);
    EXPECT_LT(p.var, 1e-6);
  }
}

TEST(GpModel, RevertsToThePriorFarFromData) {
  BoDataset data(Box{vec({0.0}), vec({100.0})});
  data.add(vec({0.0}), 1.0);
  data.add(vec({1.0}), 3.0);
  const GpModel m = GpModel::condition(data, hyp(1, 1.5, 0.01, 1e-4));
  const GpPrediction far = m.posterior(vec({100.0}));
  const auto st = m.standardization();
  EXPECT_NEAR(far.mean, st.mean, 1e-9);
  EXPECT_NEAR(far.var, 1.5 * st.scale * st.scale, 1e-9);
}

TEST(GpModel, PosteriorVarianceNeverExceedsThePrior) {
  Rng rng(4);
  const BoDataset data = smooth_data(12, rng);
  const GpModel m = GpModel::condition(data, hyp(1, 0.8, 0.2, 1e-3));
  for (int i = 0; i <= 200; ++i) {
    const GpPrediction p = m.predict_unit(vec({i / 200.0}));
    EXPECT_GE(p.var, 0.0);
    EXPECT_LE(p.var, 0.8 + 1e-12);
  }
}

TEST(GpModel, MoreDataNeverRaisesTheVariance) {
  Rng rng(5);
  BoDataset data(unit_box(2));
  const GpHyperparams h = hyp(2, 1.0, 0.25, 1e-3);
  std::vector<Eigen::VectorXd> queries;
  for (int i = 0; i < 50; ++i) queries.push_back(vec({uniform(rng, 0, 1), uniform(rng, 0, 1)}));
  std::vector<double> prev(queries.size(), 1.0);
  for (int n = 1; n <= 15; ++n) {
    data.add(vec({uniform(rng, 0, 1), uniform(rng, 0, 1)}), uniform(rng, -1, 1));
    // the latent variance on the unit scale ignores the target values
    const GpModel m = GpModel::condition(data, h);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const double v = m.predict_unit(queries[q]).var;
      EXPECT_LE(v, prev[q] + 1e-9);
      prev[q] = v;
    }
  }
}

TEST(GpModel, FitHandlesDuplicateInputs) {
  BoDataset data(unit_box(1));
  data.add(vec({0.5}), 1.0);
  data.add(vec({0.5}), 1.2);
  data.add(vec({0.5}), 0.9);
  data.add(vec({0.1}), -0.3);
  const GpModel m = GpModel::fit(data);
  EXPECT_GT(m.hyperparams().noise_var, 0.0);
  EXPECT_TRUE(std::isfinite(m.log_marginal_likelihood()));
  const GpPrediction p = m.posterior(vec({0.5}));
  EXPECT_TRUE(std::isfinite(p.mean));
  EXPECT_GT(p.mean, 0.0);
}

TEST(GpModel, FitNeedsTwoObservations) {
  BoDataset data(unit_box(1));
  data.add(vec({0.5}), 1.0);
  EXPECT_THROW(GpModel::fit(data), Error);
  EXPECT_NO_THROW(GpModel::condition(data, hyp(1, 1.0, 0.2, 1e-3)));
  EXPECT_THROW(GpModel::condition(BoDataset(unit_box(1)), hyp(1, 1.0, 0.2, 1e-3)), Error);
}

TEST(GpModel, FittedModelCoversASmoothFunction) {
  Rng rng(6);
  const BoDataset data = smooth_data(15, rng);
  const GpModel m = GpModel::fit(data);
  int covered = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    const GpPrediction p = m.posterior(vec({x}));
    if (std::fabs(smooth(x) - p.mean) <= 3.0 * std::sqrt(p.var)) ++covered;
  }
  EXPECT_GE(covered, 95 * n / 100);
}

TEST(GpModel, FitImprovesTheMarginalLikelihoodOverAGridPoint) {
  Rng rng(7);
  const BoDataset data = smooth_data(10, rng);
  const GpModel m = GpModel::fit(data);
  const auto st = data.standardization();
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) y[i] = (data.targets()[static_cast<std::size_t>(i)] - st.mean) / st.scale;
  const double at_default = log_marginal_likelihood(data.normalized_inputs(), y, hyp(1, 1.0, 1.0, 1e-2));
  EXPECT_GE(m.log_marginal_likelihood(), at_default);
}

TEST(GpModel, PosteriorIsEquivariantUnderAffineTargets) {
  Rng rng(8);
  BoDataset a(unit_box(2)), b(unit_box(2));
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = vec({uniform(rng, 0, 1), uniform(rng, 0, 1)});
    const double t = uniform(rng, -1, 1);
    a.add(x, t);
    b.add(x, 250.0 + 40.0 * t);
  }
  const GpHyperparams h = hyp(2, 1.0, 0.3, 1e-3);
  const GpModel ma = GpModel::condition(a, h), mb = GpModel::condition(b, h);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd q = vec({uniform(rng, 0, 1), uniform(rng, 0, 1)});
    const GpPrediction pa = ma.posterior(q), pb = mb.posterior(q);
    EXPECT_NEAR(pb.mean, 250.0 + 40.0 * pa.mean, 1e-8);
    EXPECT_NEAR(pb.var, 1600.0 * pa.var, 1e-8);
  }
}

TEST(BoDataset, RejectsOutOfBoxAndNonFinite) {
  BoDataset data(unit_box(2));
  EXPECT_THROW(data.add(vec({0.5, 1.5}), 1.0), OutOfBox);
  EXPECT_THROW(data.add(vec({0.5, 0.5}), NAN), Error);
  EXPECT_EQ(data.size(), 0u);
}

TEST(BoDataset, StandardizationUsesSampleStd) {
  BoDataset data(unit_box(1));
  data.add(vec({0.1}), 1.0);
  EXPECT_EQ(data.standardization().mean, 0.0);
  EXPECT_EQ(data.standardization().scale, 1.0);
  data.add(vec({0.2}), 3.0);
  EXPECT_EQ(data.standardization().mean, 2.0);
  EXPECT_NEAR(data.standardization().scale, std::sqrt(2.0), 1e-15);
}

}  // namespace
}  // namespace bayrn
