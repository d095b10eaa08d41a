#pragma once

#include <array>
#include <functional>
#include <string>

#include "dlo/env/episode_log.hpp"
#include "dlo/env/insertion.hpp"
#include "dlo/nn/estimator.hpp"
#include "dlo/policy/sac.hpp"

namespace dlo::policy {

/// Where the flexibility fed to the actor comes from: the simulator's ground
/// truth label, the trained estimator run on the settled shape, or a uniform
/// draw from the label range (the mismatch ablation).
enum class FMode { truth, estimated, random };

std::string to_string(FMode m);

using Actor =
    std::function<env::PrimitiveAction(const env::Observation&, const env::ActionBounds&)>;

struct EvalOptions {
  int episodes = 100;
  FMode f_mode = FMode::truth;
  std::uint64_t seed = 0;
  const nn::FlexEstimator* estimator = nullptr;  ///< required for FMode::estimated
  std::pair<double, double> f_range{0.0, 0.0};   ///< required for FMode::random
  std::string episode_log_path;                  ///< JSONL written when non-empty
};

struct BandMetrics {
  int episodes = 0;
  int successes = 0;
  double success_rate_pct = 0.0;
  double avg_signed_dist_cm = 0.0;
};

/// Overall metrics plus the per-angle-band breakdown
/// (low [0, pi/4), mid [pi/4, pi/2), high [pi/2, 3pi/4]).
struct EvalResult {
  BandMetrics overall;
  std::array<BandMetrics, 3> bands;
};

EvalResult evaluate(const Actor& actor, const env::EnvConfig& cfg, const EvalOptions& opts);

/// Recompute an EvalResult purely from an episode log; independent check of
/// the reported metrics.
EvalResult aggregate_episode_log(const std::string& path);

/// Deterministic policy as an Actor (featurize -> tanh(mean) -> rectangle
/// mapping).
Actor policy_actor(const GaussianPolicy& policy);

}  // namespace dlo::policy
