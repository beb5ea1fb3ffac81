#include <benchmark/benchmark.h>

#include <cmath>

#include "bayrn/ballcup.hpp"
#include "bayrn/bo.hpp"
#include "bayrn/config.hpp"
#include "bayrn/furuta.hpp"
#include "bayrn/gp.hpp"

namespace bayrn {
namespace {

void BM_FurutaStep(benchmark::State& state) {
  const auto xi = furuta::FurutaDomainParams::from(nominal_params(builtin_config("furuta")));
  furuta::FurutaState s{0.0, 0.3, 0.0, 0.0};
  for (auto _ : state) {
    s = furuta::step(s, 1.0, xi, 0.01, 8.0);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_FurutaStep);

void BM_BallCupStep(benchmark::State& state) {
  const auto xi = ballcup::BallCupDomainParams::from(nominal_params(builtin_config("ballcup")));
  const ballcup::BallCupModel model;
  ballcup::BallCupState s = ballcup::rest_state(xi, model);
  double t = 0.0;
  for (auto _ : state) {
    s = ballcup::step(s, 5.0 * std::sin(t), xi, model, 0.002);
    t += 0.002;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_BallCupStep);

BoDataset random_dataset(std::size_t n) {
  Box box{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  BoDataset data(box);
  Rng rng(1);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x(2);
    x << uniform(rng, 0.0, 1.0), uniform(rng, 0.0, 1.0);
    data.add(x, std::sin(6.0 * x[0]) + x[1]);
  }
  return data;
}

void BM_GpFit(benchmark::State& state) {
  const BoDataset data = random_dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(GpModel::fit(data));
}
BENCHMARK(BM_GpFit)->Arg(5)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_MaximizeAcquisition(benchmark::State& state) {
  const GpModel model = GpModel::fit(random_dataset(20));
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(maximize_acquisition(model, SearchOptions{}, rng));
}
BENCHMARK(BM_MaximizeAcquisition)->Unit(benchmark::kMillisecond);

void BM_ExpectedImprovement(benchmark::State& state) {
  double mu = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_improvement(mu, 0.5, 0.2));
    mu += 1e-9;
  }
}
BENCHMARK(BM_ExpectedImprovement);

}  // namespace
}  // namespace bayrn

BENCHMARK_MAIN();
