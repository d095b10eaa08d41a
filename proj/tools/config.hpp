#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dlo/env/insertion.hpp"
#include "dlo/policy/sac.hpp"

namespace dlo::cli {

struct FlexDataSection {
  int sweep_levels = 200;
  double sweep_lo = 0.05;
  double sweep_hi = 1.0;
  int per_sweep_augments = 50;
  int val_augments = 5;
  int test_augments = 5;
  double lambda_lo = 0.85;
  double lambda_hi = 1.0;
  double noise_std = 0.003;
};

struct EstimatorSection {
  int gnn_hidden = 32;
  std::vector<int> mlp_hidden{8};
  int epochs = 60;
  int batch = 64;
  double lr = 1e-3;
  bool train_mlp = true;
  bool train_gnn_noaug = true;
};

struct EnvSection {
  int n = 40;
  double radius_lo = 0.01;
  double radius_hi = 0.025;
  double angle_lo = 0.0;
  double angle_hi = 2.356194490192344928846982537459627163;
  double ring_square_half = 0.05;
  double rope_offset_half = 0.05;
  double sweep_lo = 0.05;
  double sweep_hi = 1.0;
  int sweep_levels = 200;
};

struct SacSection {
  std::vector<int> actor_hidden{128, 128};
  std::vector<int> critic_hidden{128, 128};
  double lr = 3e-4;
  int batch = 256;
  int replay_capacity = 1000000;
  double tau_smooth = 0.005;
  double gamma = 0.99;
  int episodes = 8000;
  int warmup = 1000;
  int updates_per_episode = 1;
  int eval_every = 1000;
  int eval_episodes = 20;
};

struct TrainPolicySection {
  std::vector<std::string> regimes{"rand", "fix"};  ///< ring-angle regime
  std::vector<bool> f_settings{true, false};
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

struct EvalSection {
  int episodes = 100;
  double radius = 0.025;
  std::string f_mode = "truth";  ///< truth | estimated | random
  double vb_alpha = 5.0;
  double vb_beta = 5.0;
  std::string dataset = "";    ///< defaults to <out>/flex_dataset.jsonl
  std::string estimator = "";  ///< defaults to <out>/estimator_gnn.json
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  FlexDataSection flex_data;
  EstimatorSection estimator;
  EnvSection env;
  SacSection sac;
  TrainPolicySection train_policy;
  EvalSection eval;

  /// Paper-stated range guards; overridable with allow_out_of_range.
  void validate(bool allow_out_of_range) const;

  env::EnvConfig make_env_config(bool fixed_theta, bool provide_f) const;
  policy::SacConfig make_sac_config(std::uint64_t run_seed) const;
};

/// defaults for --profile desk|paper
ExperimentConfig profile_config(const std::string& profile);

/// Strict JSON load: unknown keys anywhere are a validation error. Missing
/// keys keep the profile's defaults.
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base);

std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace dlo::cli
