#include "dlo/policy/evaluate.hpp"

#include <cmath>
#include <memory>

#include "dlo/flex/dataset.hpp"
#include "dlo/policy/featurize.hpp"

namespace dlo::policy {

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;

int band_of(double theta) {
  if (theta < kPi / 4.0) return 0;
  if (theta < kPi / 2.0) return 1;
  return 2;
}

void fold_in(BandMetrics& m, bool success, double signed_dist) {
  ++m.episodes;
  if (success) ++m.successes;
  m.avg_signed_dist_cm += signed_dist;  // running sum; finalized later
}

void finalize(BandMetrics& m) {
  if (m.episodes == 0) return;
  m.success_rate_pct = 100.0 * m.successes / m.episodes;
  m.avg_signed_dist_cm = 100.0 * m.avg_signed_dist_cm / m.episodes;  // meters -> cm
}

}  // namespace

std::string to_string(FMode m) {
  switch (m) {
    case FMode::truth: return "truth";
    case FMode::estimated: return "estimated";
    default: return "random";
  }
}

EvalResult evaluate(const Actor& actor, const env::EnvConfig& cfg, const EvalOptions& opts) {
  if (opts.episodes < 1) throw ValidationError("evaluate: episodes must be >= 1");
  if (opts.f_mode == FMode::estimated && opts.estimator == nullptr)
    throw ValidationError("evaluate: estimated f requested without a trained estimator");
  if (opts.f_mode != FMode::truth && !cfg.provide_f)
    throw ValidationError("evaluate: f substitution requires an f-conditioned environment");

  std::unique_ptr<env::EpisodeLogWriter> log;
  if (!opts.episode_log_path.empty())
    log = std::make_unique<env::EpisodeLogWriter>(opts.episode_log_path);

  Rng f_rng = Rng::stream(opts.seed, "eval/random_f");
  EvalResult res;
  for (int ep = 0; ep < opts.episodes; ++ep) {
    const std::uint64_t ep_seed = Rng::stream_seed(opts.seed, "eval/episode", ep);
    auto [obs, scene] = env::reset(cfg, ep_seed);

    if (cfg.provide_f) {
      if (opts.f_mode == FMode::estimated) {
        const flex::RigResult rig = flex::run_input_rig(scene.sweep_param);
        obs.flexibility = opts.estimator->predict(rig.curve);
      } else if (opts.f_mode == FMode::random) {
        obs.flexibility = f_rng.uniform(opts.f_range.first, opts.f_range.second);
      }
    }

    const env::ActionBounds bounds = env::ActionBounds::for_ring(scene.ring);
    const env::PrimitiveAction action = actor(obs, bounds);
    const env::EpisodeOutcome outcome = env::execute_episode(scene, action);

    fold_in(res.overall, outcome.success, outcome.signed_endpoint_distance);
    fold_in(res.bands[band_of(scene.ring.angle)], outcome.success,
            outcome.signed_endpoint_distance);

    if (log) {
      env::EpisodeRecord rec;
      rec.seed = ep_seed;
      rec.sweep_param = scene.sweep_param;
      rec.f = obs.flexibility.value_or(scene.flexibility);
      rec.theta = scene.ring.angle;
      rec.radius = scene.ring.inner_radius;
      rec.action = action.to_vector();
      rec.rope_in = outcome.rope_in;
      rec.rope_out = outcome.rope_out;
      rec.reward = outcome.reward;
      rec.signed_endpoint_distance = outcome.signed_endpoint_distance;
      rec.success = outcome.success;
      log->write(rec);
    }
  }
  finalize(res.overall);
  for (BandMetrics& b : res.bands) finalize(b);
  return res;
}

EvalResult aggregate_episode_log(const std::string& path) {
  EvalResult res;
  for (const env::EpisodeRecord& rec : env::read_episode_log(path)) {
    fold_in(res.overall, rec.success, rec.signed_endpoint_distance);
    fold_in(res.bands[band_of(rec.theta)], rec.success, rec.signed_endpoint_distance);
  }
  finalize(res.overall);
  for (BandMetrics& b : res.bands) finalize(b);
  return res;
}

Actor policy_actor(const GaussianPolicy& policy) {
  return [&policy](const env::Observation& obs, const env::ActionBounds& bounds) {
    const Eigen::VectorXd feats = featurize(obs);
    if (feats.size() != policy.obs_dim())
      throw ValidationError("policy_actor: observation width does not match the policy");
    return env::PrimitiveAction::from_normalized(policy.act_deterministic(feats), bounds);
  };
}

}  // namespace dlo::policy
