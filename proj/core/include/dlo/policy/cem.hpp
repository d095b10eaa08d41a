#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dlo/policy/one_shot.hpp"

namespace dlo::policy {

struct CemConfig {
  int population = 64;
  int elites = 8;
  int iterations = 40;
  double init_std = 0.5;
  double std_floor = 0.02;
  std::uint64_t seed = 0;
};

struct CemResult {
  Eigen::VectorXd mean;  ///< normalized action space
  Eigen::VectorXd std;
  double best_reward = 0.0;
  std::vector<double> elite_mean_reward;  ///< per iteration
};

/// Cross-entropy search over the 7-D normalized action for one fixed scene
/// (the env is reset with context_seed before every rollout). iterations = 0
/// returns the prior. elites = population degenerates to refitting on the
/// whole sample.
CemResult cem_train(OneShotEnv& env, std::uint64_t context_seed, const CemConfig& cfg);

}  // namespace dlo::policy
