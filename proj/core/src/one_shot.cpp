#include "dlo/policy/one_shot.hpp"

#include "dlo/policy/featurize.hpp"

namespace dlo::policy {

InsertionOneShot::InsertionOneShot(const env::EnvConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

int InsertionOneShot::feature_dim() const { return policy::feature_dim(cfg_.n, cfg_.provide_f); }

Eigen::VectorXd InsertionOneShot::reset(std::uint64_t episode_seed) {
  const std::uint64_t seed = fixed_seed_ ? *fixed_seed_ : episode_seed;
  auto [obs, scene] = env::reset(cfg_, seed);
  obs_ = std::move(obs);
  scene_ = std::move(scene);
  has_scene_ = true;
  return featurize(obs_);
}

double InsertionOneShot::step(const Eigen::VectorXd& action_norm) {
  if (!has_scene_) throw ValidationError("InsertionOneShot::step before reset");
  const env::ActionBounds bounds = env::ActionBounds::for_ring(scene_.ring);
  const env::PrimitiveAction action = env::PrimitiveAction::from_normalized(action_norm, bounds);
  last_ = env::execute_episode(scene_, action);
  has_scene_ = false;  // scene is consumed by the open-loop episode
  return last_.reward;
}

}  // namespace dlo::policy
