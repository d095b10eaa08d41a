#include "dlo/policy/cem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dlo/rng.hpp"

namespace dlo::policy {

CemResult cem_train(OneShotEnv& env, std::uint64_t context_seed, const CemConfig& cfg) {
  if (cfg.population < 1 || cfg.elites < 1 || cfg.elites > cfg.population)
    throw ValidationError("cem_train: need 1 <= elites <= population");

  constexpr int kDim = 7;
  CemResult res;
  res.mean = Eigen::VectorXd::Zero(kDim);
  res.std = Eigen::VectorXd::Constant(kDim, cfg.init_std);
  res.best_reward = -std::numeric_limits<double>::infinity();

  Rng rng = Rng::stream(cfg.seed, "cem");
  Eigen::MatrixXd samples(cfg.population, kDim);
  std::vector<double> rewards(cfg.population);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    for (int k = 0; k < cfg.population; ++k) {
      for (int d = 0; d < kDim; ++d)
        samples(k, d) = std::clamp(res.mean[d] + res.std[d] * rng.normal(), -1.0, 1.0);
      env.reset(context_seed);
      rewards[k] = env.step(samples.row(k).transpose());
      res.best_reward = std::max(res.best_reward, rewards[k]);
    }

    std::vector<int> order(cfg.population);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rewards[a] > rewards[b]; });

    Eigen::VectorXd mu = Eigen::VectorXd::Zero(kDim);
    for (int e = 0; e < cfg.elites; ++e) mu += samples.row(order[e]).transpose();
    mu /= static_cast<double>(cfg.elites);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(kDim);
    for (int e = 0; e < cfg.elites; ++e) {
      const Eigen::VectorXd d = samples.row(order[e]).transpose() - mu;
      var += d.cwiseProduct(d);
    }
    var /= static_cast<double>(cfg.elites);

    res.mean = mu;
    res.std = var.cwiseSqrt().cwiseMax(cfg.std_floor);
    double elite_sum = 0.0;
    for (int e = 0; e < cfg.elites; ++e) elite_sum += rewards[order[e]];
    res.elite_mean_reward.push_back(elite_sum / cfg.elites);
  }
  return res;
}

}  // namespace dlo::policy
