#include "bayrn/polopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "bayrn/errors.hpp"

namespace bayrn {

const char* to_string(PolOptAlgorithm a) {
  switch (a) {
    case PolOptAlgorithm::cem: return "cem";
    case PolOptAlgorithm::power: return "power";
  }
  return "?";
}

PolOptAlgorithm polopt_algorithm_from_string(const std::string& name) {
  if (name == "cem") return PolOptAlgorithm::cem;
  if (name == "power") return PolOptAlgorithm::power;
  throw Error("unknown policy optimizer '" + name + "'");
}

void PolOptConfig::validate() const {
  if (n_pop < 2) throw Error("polopt: n_pop must be at least 2");
  if (n_is < 1 || n_is > n_pop) throw Error("polopt: need 1 <= n_is <= n_pop");
  if (!(sigma_init > 0.0)) throw Error("polopt: sigma_init must be positive");
  if (!(discount >= 0.0 && discount <= 1.0)) throw Error("polopt: discount must lie in [0, 1]");
  if (!(elite_frac > 0.0 && elite_frac <= 1.0)) throw Error("polopt: elite_frac must lie in (0, 1]");
  if (!(min_std >= 0.0)) throw Error("polopt: min_std must be non-negative");
  if (rollouts_per_candidate < 1) throw Error("polopt: rollouts_per_candidate must be >= 1");
  if (eval_rollouts < 1) throw Error("polopt: eval_rollouts must be >= 1");
  if (threads < 1) throw Error("polopt: threads must be >= 1");
}

namespace {

// Indices sorted by descending return; ties keep the lower index first.
std::vector<std::size_t> rank_by_return(std::span<const Candidate> c) {
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return c[a].ret > c[b].ret; });
  return idx;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += threads) fn(i, w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

constexpr std::uint64_t kEvalStream = 0xe7a1ULL << 32;
constexpr std::uint64_t kRetryStream = 0x5eedULL;

class Trainer {
 public:
  Trainer(const TrainingProblem& problem, const PolOptConfig& cfg, std::uint64_t seed)
      : problem_(problem), cfg_(cfg), seed_(seed) {
    if (!problem_.policy) throw Error("train: no policy");
    if (static_cast<std::size_t>(problem_.init.size()) != problem_.policy->param_dim()) {
      throw DimensionMismatch("initial policy params", problem_.policy->param_dim(),
                              static_cast<std::size_t>(problem_.init.size()));
    }
    for (std::size_t w = 0; w < cfg_.threads; ++w) envs_.push_back(problem_.make_env());
  }

  TrainResult run() {
    Rng rng = make_rng(seed_, 0);
    best_ = {problem_.init, -std::numeric_limits<double>::infinity()};
    Eigen::VectorXd center = problem_.init;
    Eigen::VectorXd spread = Eigen::VectorXd::Constant(center.size(), cfg_.sigma_init);
    std::vector<Candidate> history;

    for (std::size_t gen = 0; gen < cfg_.n_iter; ++gen) {
      std::vector<Candidate> pop(cfg_.n_pop);
      for (auto& c : pop) {
        c.params.resize(center.size());
        for (Eigen::Index k = 0; k < c.params.size(); ++k) {
          c.params[k] = center[k] + spread[k] * standard_normal(rng);
        }
      }
      evaluate(pop, 1 + gen * cfg_.n_pop);

      double sum = 0.0;
      for (const auto& c : pop) {
        sum += c.ret;
        if (c.ret > best_.ret) best_ = c;
      }
      curve_.push_back({gen, best_.ret, sum / static_cast<double>(pop.size())});

      if (cfg_.algorithm == PolOptAlgorithm::cem) {
        auto g = cem_update(pop, cfg_.elite_frac, cfg_.min_std);
        center = std::move(g.mean);
        spread = std::move(g.std);
      } else {
        history.insert(history.end(), pop.begin(), pop.end());
        center = power_update(center, history, cfg_.n_is);
      }
    }

    // Score the final search center and the best candidate on the same fresh
    // domain draws and keep the better one.
    auto& env = *envs_.front();
    const double center_ret = evaluate_params(problem_, env, center, cfg_.eval_rollouts,
                                              cfg_.discount, seed_, kEvalStream);
    TrainResult out;
    out.params = center;
    out.sim_return = center_ret;
    if (std::isfinite(best_.ret) && !(best_.params.array() == center.array()).all()) {
      const double best_ret = evaluate_params(problem_, env, best_.params, cfg_.eval_rollouts,
                                              cfg_.discount, seed_, kEvalStream);
      if (best_ret > center_ret) {
        out.params = best_.params;
        out.sim_return = best_ret;
      }
    }
    out.curve = std::move(curve_);
    out.seed = seed_;
    return out;
  }

 private:
  void evaluate(std::vector<Candidate>& pop, std::uint64_t first_stream) {
    parallel_for(pop.size(), cfg_.threads, [&](std::size_t i, std::size_t worker) {
      pop[i].ret = evaluate_params(problem_, *envs_[worker], pop[i].params,
                                   cfg_.rollouts_per_candidate, cfg_.discount, seed_,
                                   first_stream + i);
    });
  }

  const TrainingProblem& problem_;
  const PolOptConfig& cfg_;
  std::uint64_t seed_;
  std::vector<std::unique_ptr<Environment>> envs_;
  Candidate best_;
  std::vector<GenerationStats> curve_;
};

}  // namespace

Eigen::VectorXd power_update(const Eigen::VectorXd& theta, std::span<const Candidate> history,
                             std::size_t n_is) {
  if (history.empty()) throw Error("power_update: empty rollout history");
  if (n_is < 1) throw Error("power_update: n_is must be >= 1");
  double shift = 0.0;
  for (const auto& c : history) {
    if (!std::isfinite(c.ret)) throw Error("power_update: non-finite return");
    if (static_cast<Eigen::Index>(c.params.size()) != theta.size()) {
      throw DimensionMismatch("rollout params", static_cast<std::size_t>(theta.size()),
                              static_cast<std::size_t>(c.params.size()));
    }
    shift = std::min(shift, c.ret);
  }
  const auto order = rank_by_return(history);
  const std::size_t n = std::min(n_is, history.size());

  constexpr double kGuard = 1e-8;
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(theta.size());
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = history[order[k]];
    const double w = c.ret - shift;
    weighted += w * (c.params - theta);
    total += w;
  }
  return theta + weighted / std::max(total, kGuard);
}

GaussianSearch cem_update(std::span<const Candidate> population, double elite_frac,
                          double min_std) {
  if (population.size() < 2) throw Error("cem_update: population must have at least 2 members");
  if (!(elite_frac > 0.0 && elite_frac <= 1.0)) throw Error("cem_update: elite_frac must lie in (0, 1]");
  const auto order = rank_by_return(population);
  const auto n_elite = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(elite_frac * static_cast<double>(population.size()) - 1e-9)));

  const Eigen::Index d = population.front().params.size();
  GaussianSearch g{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  for (std::size_t k = 0; k < n_elite; ++k) g.mean += population[order[k]].params;
  g.mean /= static_cast<double>(n_elite);
  for (std::size_t k = 0; k < n_elite; ++k) {
    g.std += (population[order[k]].params - g.mean).cwiseAbs2();
  }
  g.std = (g.std / static_cast<double>(n_elite)).cwiseSqrt().cwiseMax(min_std);
  return g;
}

double evaluate_params(const TrainingProblem& problem, Environment& env,
                       const Eigen::VectorXd& params, std::size_t rollouts, double gamma,
                       std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_rng(seed, stream);
  const std::span<const double> p(params.data(), static_cast<std::size_t>(params.size()));
  double sum = 0.0;
  for (std::size_t m = 0; m < rollouts; ++m) {
    const DomainParams xi = problem.sampler.sample(rng);
    sum += run_episode(env, *problem.policy, p, xi, rng, gamma).ret;
  }
  return sum / static_cast<double>(rollouts);
}

TrainResult train(const TrainingProblem& problem, const PolOptConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  TrainResult first = Trainer(problem, cfg, seed).run();
  if (!(first.sim_return < cfg.retrain_threshold)) return first;

  TrainResult second = Trainer(problem, cfg, derive_seed(seed, kRetryStream)).run();
  second.retrained = true;
  if (second.sim_return > first.sim_return) return second;
  first.retrained = true;
  return first;
}

}  // namespace bayrn
