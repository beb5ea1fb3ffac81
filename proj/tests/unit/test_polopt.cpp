#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "bayrn/config.hpp"
#include "bayrn/environment.hpp"
#include "bayrn/errors.hpp"
#include "bayrn/polopt.hpp"
#include "quadratic_problem.hpp"

namespace bayrn {
namespace {

using test::quadratic_problem;

TEST(DiscountedReturn, ClosedForms) {
  const std::vector<double> ones600(600, 1.0);
  EXPECT_EQ(discounted_return(ones600, 1.0), 600.0);
  const std::vector<double> ones20(20, 1.0);
  EXPECT_NEAR(discounted_return(ones20, 0.5), 2.0 * (1.0 - std::pow(0.5, 20)), 1e-15);
  const std::vector<double> r{0.7, 3.0, -2.0};
  EXPECT_EQ(discounted_return(r, 0.0), 0.7);
  EXPECT_EQ(discounted_return(std::vector<double>{}, 0.9), 0.0);
}

Candidate cand(std::initializer_list<double> p, double ret) {
  Candidate c;
  c.params = Eigen::Map<const Eigen::VectorXd>(p.begin(), static_cast<Eigen::Index>(p.size()));
  c.ret = ret;
  return c;
}

TEST(PowerUpdate, SingleRolloutStepsToIt) {
  const Eigen::Vector2d theta(1.0, -1.0);
  const std::vector<Candidate> h{cand({1.5, -0.5}, 1.0)};
  const Eigen::VectorXd next = power_update(theta, h, 10);
  EXPECT_NEAR(next[0], 1.5, 1e-8);
  EXPECT_NEAR(next[1], -0.5, 1e-8);
}

TEST(PowerUpdate, EqualReturnsAverageTheElite) {
  const Eigen::Vector2d theta(0.0, 0.0);
  const std::vector<Candidate> h{cand({1.0, 0.0}, 2.0), cand({0.0, 3.0}, 2.0), cand({-4.0, 1.0}, 2.0)};
  const Eigen::VectorXd next = power_update(theta, h, 2);
  // ties keep history order, so the first two are the elite
  EXPECT_NEAR(next[0], 0.5, 1e-12);
  EXPECT_NEAR(next[1], 1.5, 1e-12);
}

TEST(PowerUpdate, ThreeRolloutHandExample) {
  const Eigen::Vector2d theta(0.5, 0.5);
  const Eigen::Vector2d e1(1.0, 2.0), e2(-3.0, 1.0), e3(7.0, 7.0);
  std::vector<Candidate> h(3);
  h[0] = {theta + e1, 3.0};
  h[1] = {theta + e2, 1.0};
  h[2] = {theta + e3, 0.0};
  const Eigen::VectorXd next = power_update(theta, h, 2);
  const Eigen::Vector2d want = theta + (3.0 * e1 + 1.0 * e2) / 4.0;
  EXPECT_NEAR(next[0], want[0], 1e-12);
  EXPECT_NEAR(next[1], want[1], 1e-12);
}

TEST(PowerUpdate, NegativeReturnsAreShiftedByTheMinimum) {
  const Eigen::Vector2d theta(0.0, 0.0);
  const std::vector<Candidate> h{cand({1.0, 0.0}, -1.0), cand({0.0, 1.0}, -3.0), cand({5.0, 5.0}, -4.0)};
  const Eigen::VectorXd next = power_update(theta, h, 2);
  // shifted returns 3 and 1
  EXPECT_NEAR(next[0], 0.75, 1e-12);
  EXPECT_NEAR(next[1], 0.25, 1e-12);
}

TEST(PowerUpdate, EmptyHistoryThrows) {
  EXPECT_THROW(power_update(Eigen::Vector2d::Zero(), std::vector<Candidate>{}, 3), Error);
}

TEST(PowerUpdate, ResultLiesInTheConvexHullOfTheElite) {
  Rng rng(12);
  const Eigen::Index d = 16;
  const std::size_t n_is = 10;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd theta = perturb(Eigen::VectorXd::Zero(d), 1.0, rng);
    const std::size_t n = 10 + static_cast<std::size_t>(uniform(rng, 0.0, 40.0));
    std::vector<Candidate> h(n);
    for (auto& c : h) {
      c.params = perturb(theta, 0.5, rng);
      c.ret = uniform(rng, -5.0, 5.0);
    }
    const Eigen::VectorXd next = power_update(theta, h, n_is);

    // elite = n_is largest returns; solve next - theta = E * lambda
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return h[a].ret > h[b].ret; });
    Eigen::MatrixXd E(d, static_cast<Eigen::Index>(n_is));
    for (std::size_t k = 0; k < n_is; ++k) E.col(static_cast<Eigen::Index>(k)) = h[idx[k]].params - theta;
    const Eigen::VectorXd lambda = E.colPivHouseholderQr().solve(next - theta);
    EXPECT_LT((E * lambda - (next - theta)).norm(), 1e-9);
    EXPECT_GE(lambda.minCoeff(), -1e-9);
    EXPECT_LE(lambda.sum(), 1.0 + 1e-9);
  }
}

TEST(CemUpdate, IdenticalPopulationGivesTheFloor) {
  const std::vector<Candidate> pop(5, cand({1.0, 2.0}, 0.0));
  const GaussianSearch g = cem_update(pop, 0.4, 0.05);
  EXPECT_EQ(g.mean, Eigen::Vector2d(1.0, 2.0));
  EXPECT_EQ(g.std, Eigen::Vector2d(0.05, 0.05));
}

TEST(CemUpdate, FullEliteIsThePopulationMean) {
  const std::vector<Candidate> pop{cand({0.0}, 1.0), cand({2.0}, 5.0), cand({7.0}, -1.0)};
  const GaussianSearch g = cem_update(pop, 1.0, 0.0);
  EXPECT_NEAR(g.mean[0], 3.0, 1e-15);
}

TEST(CemUpdate, FourPointHandExample) {
  const std::vector<Candidate> pop{cand({1.0, 0.0}, 1.0), cand({3.0, 4.0}, 4.0), cand({9.0, 9.0}, 0.0),
                                   cand({5.0, 2.0}, 3.0)};
  const GaussianSearch g = cem_update(pop, 0.5, 0.0);
  // top two: (3, 4) and (5, 2)
  EXPECT_NEAR(g.mean[0], 4.0, 1e-15);
  EXPECT_NEAR(g.mean[1], 3.0, 1e-15);
  EXPECT_NEAR(g.std[0], 1.0, 1e-15);
  EXPECT_NEAR(g.std[1], 1.0, 1e-15);
}

TEST(CemUpdate, TooSmallPopulationThrows) {
  const std::vector<Candidate> pop{cand({1.0}, 1.0)};
  EXPECT_THROW(cem_update(pop, 0.5, 0.0), Error);
}

PolOptConfig cem_config() {
  PolOptConfig c;
  c.algorithm = PolOptAlgorithm::cem;
  c.n_pop = 50;
  c.n_iter = 50;
  c.sigma_init = 1.0;
  c.elite_frac = 0.2;
  c.min_std = 1e-6;
  c.eval_rollouts = 1;
  return c;
}

TEST(Train, CemConvergesOnAQuadratic) {
  const Eigen::Vector2d optimum(1.3, -0.7);
  const TrainResult r = train(quadratic_problem(optimum), cem_config(), 4);
  EXPECT_LT((r.params - optimum).norm(), 1e-2);
  EXPECT_EQ(r.curve.size(), 50u);
}

TEST(Train, PowerImprovesOnAQuadratic) {
  const Eigen::Vector2d optimum(0.4, -0.2);
  PolOptConfig c;
  c.algorithm = PolOptAlgorithm::power;
  c.n_pop = 20;
  c.n_is = 5;
  c.n_iter = 30;
  c.sigma_init = 0.3;
  const TrainResult r = train(quadratic_problem(optimum), c, 4);
  EXPECT_LT((r.params - optimum).norm(), 0.5 * optimum.norm());
}

TEST(Train, ZeroIterationsReturnTheInitialParameters) {
  PolOptConfig c = cem_config();
  c.n_iter = 0;
  TrainingProblem p = quadratic_problem(Eigen::Vector2d(1.0, 1.0));
  p.init = Eigen::Vector2d(0.25, -3.0);
  const TrainResult r = train(p, c, 1);
  EXPECT_EQ(r.params, p.init);
  EXPECT_TRUE(r.curve.empty());
}

TEST(Train, BestSoFarNeverDecreases) {
  const TrainResult r = train(quadratic_problem(Eigen::Vector2d(2.0, 2.0)), cem_config(), 9);
  for (std::size_t g = 1; g < r.curve.size(); ++g) {
    EXPECT_GE(r.curve[g].best_return, r.curve[g - 1].best_return);
  }
}

TEST(Train, DeterministicAndThreadIndependent) {
  const auto p = quadratic_problem(Eigen::Vector3d(1.0, 2.0, 3.0));
  PolOptConfig c = cem_config();
  c.n_iter = 10;
  const TrainResult a = train(p, c, 21);
  const TrainResult b = train(p, c, 21);
  c.threads = 3;
  const TrainResult t = train(p, c, 21);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.params, t.params);
  EXPECT_EQ(a.sim_return, t.sim_return);
  const TrainResult other = train(p, cem_config(), 22);
  EXPECT_NE(a.params, other.params);
}

TEST(Train, EachRolloutDrawsAFreshDomain) {
  // the optimum moves with the sampled shift; training on a spread of shifts
  // lands near the mean shift
  const DistrSpace space({{"shift", Family::uniform, {-1.0, 1.0}, {0.0, 0.1}}});
  DomainDistrParams phi{{{"shift", Family::uniform, 0.5, 0.1}}};
  const DomainSpecTable specs{{"shift", 0.0, -10.0, 10.0}};
  TrainingProblem p = quadratic_problem(Eigen::VectorXd::Zero(1));
  p.sampler = DomainSampler(space, phi, specs);
  PolOptConfig c = cem_config();
  c.rollouts_per_candidate = 20;
  c.eval_rollouts = 50;
  c.min_std = 1e-3;
  const TrainResult r = train(p, c, 3);
  EXPECT_NEAR(r.params[0], 0.5, 0.1);
}

TEST(Train, RetrainHookRunsOnceMore) {
  PolOptConfig c = cem_config();
  c.n_iter = 3;
  c.retrain_threshold = std::numeric_limits<double>::infinity();
  const TrainResult r = train(quadratic_problem(Eigen::Vector2d(1.0, 1.0)), c, 5);
  EXPECT_TRUE(r.retrained);
  const TrainResult again = train(quadratic_problem(Eigen::Vector2d(1.0, 1.0)), c, 5);
  EXPECT_EQ(r.params, again.params);
}

TEST(Train, InvalidConfigIsRejected) {
  PolOptConfig c = cem_config();
  c.n_is = c.n_pop + 1;
  EXPECT_THROW(train(quadratic_problem(Eigen::Vector2d(1.0, 1.0)), c, 1), Error);
  c = cem_config();
  c.discount = 1.5;
  EXPECT_THROW(train(quadratic_problem(Eigen::Vector2d(1.0, 1.0)), c, 1), Error);
}

TEST(Train, NominalFurutaReachesTheSuccessThreshold) {
  const ExperimentConfig cfg = builtin_config("furuta");
  const TrainingProblem p{make_env_factory(cfg), DomainSampler(nominal_params(cfg)), make_policy(cfg),
                          initial_policy_params(cfg)};
  const TrainResult r = train(p, cfg.polopt, 1);
  EXPECT_GE(r.sim_return, 375.0);
}

}  // namespace
}  // namespace bayrn
