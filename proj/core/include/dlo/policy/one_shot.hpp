#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "dlo/env/insertion.hpp"

namespace dlo::policy {

/// Single-step episode environment: reset() yields the observation features,
/// step() consumes one normalized action in [-1, 1]^7 and returns the
/// episode's terminal reward. There is no successor state.
class OneShotEnv {
 public:
  virtual ~OneShotEnv() = default;
  virtual int feature_dim() const = 0;
  virtual Eigen::VectorXd reset(std::uint64_t episode_seed) = 0;
  virtual double step(const Eigen::VectorXd& action_norm) = 0;
  virtual bool last_success() const { return false; }
  virtual double last_signed_distance() const { return 0.0; }
};

/// The insertion task behind the OneShotEnv interface.
class InsertionOneShot : public OneShotEnv {
 public:
  explicit InsertionOneShot(const env::EnvConfig& cfg);

  /// Pin the scene to one seed regardless of reset argument (fixed context
  /// for black-box optimizers).
  void fix_context(std::uint64_t seed) { fixed_seed_ = seed; }

  int feature_dim() const override;
  Eigen::VectorXd reset(std::uint64_t episode_seed) override;
  double step(const Eigen::VectorXd& action_norm) override;
  bool last_success() const override { return last_.success; }
  double last_signed_distance() const override { return last_.signed_endpoint_distance; }

  const env::Scene& scene() const { return scene_; }
  const env::Observation& observation() const { return obs_; }
  const env::EpisodeOutcome& last_outcome() const { return last_; }

 private:
  env::EnvConfig cfg_;
  env::Scene scene_;
  env::Observation obs_;
  env::EpisodeOutcome last_;
  std::optional<std::uint64_t> fixed_seed_;
  bool has_scene_ = false;
};

/// Reward = -|a - c|^2 around a hidden optimum c in [-1, 1]^7; the sanity
/// target for the policy optimizers.
class QuadraticOneShot : public OneShotEnv {
 public:
  explicit QuadraticOneShot(const Eigen::VectorXd& optimum) : c_(optimum) {}
  int feature_dim() const override { return 1; }
  Eigen::VectorXd reset(std::uint64_t) override { return Eigen::VectorXd::Zero(1); }
  double step(const Eigen::VectorXd& a) override {
    last_dist_ = (a - c_).norm();
    return -last_dist_ * last_dist_;
  }
  double last_signed_distance() const override { return -last_dist_; }
  const Eigen::VectorXd& optimum() const { return c_; }

 private:
  Eigen::VectorXd c_;
  double last_dist_ = 0.0;
};

}  // namespace dlo::policy
