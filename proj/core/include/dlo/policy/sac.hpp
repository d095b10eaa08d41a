#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dlo/nn/adam.hpp"
#include "dlo/nn/dense.hpp"
#include "dlo/policy/one_shot.hpp"
#include "dlo/rng.hpp"

namespace dlo::policy {

/// Squashed-Gaussian actor: a dense trunk emits per-dimension mean and
/// log-std; samples are tanh-squashed into [-1, 1].
class GaussianPolicy {
 public:
  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, const std::vector<int>& hidden, int action_dim, Rng& rng);

  struct Sample {
    Eigen::MatrixXd action;      ///< B x A, tanh-squashed
    Eigen::VectorXd logp;        ///< B
    Eigen::MatrixXd mean;        ///< pre-squash
    Eigen::MatrixXd log_std;     ///< clamped
    Eigen::MatrixXd raw_log_std; ///< before clamping (for the clamp mask)
    Eigen::MatrixXd eps;         ///< the standard-normal draws
    nn::DenseNet::Cache cache;
  };

  Sample sample(const Eigen::MatrixXd& obs, Rng& rng) const;
  Eigen::VectorXd act_deterministic(const Eigen::VectorXd& obs) const;  ///< tanh(mean)

  int obs_dim() const { return trunk_.input_width(); }
  int action_dim() const { return action_dim_; }
  nn::DenseNet& trunk() { return trunk_; }
  const nn::DenseNet& trunk() const { return trunk_; }

 private:
  nn::DenseNet trunk_;
  int action_dim_ = 0;
};

struct SacConfig {
  std::vector<int> actor_hidden{128, 128};
  std::vector<int> critic_hidden{128, 128};
  double lr = 3e-4;
  int batch = 256;
  int replay_capacity = 1000000;
  double tau_smooth = 0.005;  ///< kept for the config schema; single-step
                              ///< targets never consult a target network
  double gamma = 0.99;        ///< likewise inert: episodes are terminal
  double init_alpha = 0.2;
  double target_entropy = -7.0;  ///< -action_dim
  int episodes = 8000;
  int warmup = 1000;             ///< uniform random episodes before learning
  int updates_per_episode = 1;
  int eval_every = 1000;
  int eval_episodes = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Flat storage of (observation, action, reward) transitions. Episodes are
/// single-step, so there is no successor state and no bootstrapping.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int obs_dim, int act_dim);
  void add(const Eigen::VectorXd& obs, const Eigen::VectorXd& act, double reward);
  int size() const { return size_; }
  int obs_dim() const { return static_cast<int>(obs_.cols()); }
  int act_dim() const { return static_cast<int>(act_.cols()); }

  struct Batch {
    Eigen::MatrixXd obs;
    Eigen::MatrixXd act;
    Eigen::VectorXd rew;
  };
  Batch sample(int batch, Rng& rng) const;
  Batch all() const;

  void save_jsonl(const std::string& path) const;
  void load_jsonl(const std::string& path);

 private:
  Eigen::MatrixXd obs_, act_;
  Eigen::VectorXd rew_;
  int size_ = 0;
  int next_ = 0;
};

/// Twin-critic soft actor-critic specialized to one-step episodes: the
/// critic target is the observed reward, the actor maximizes
/// min(Q1, Q2) - alpha log pi with a reparameterized sample, and the entropy
/// temperature is tuned toward target_entropy.
class SacLearner {
 public:
  SacLearner() = default;
  SacLearner(int obs_dim, const SacConfig& cfg);

  Eigen::VectorXd act(const Eigen::VectorXd& obs);                ///< stochastic
  Eigen::VectorXd act_deterministic(const Eigen::VectorXd& obs) const;
  Eigen::VectorXd warmup_action();                                ///< uniform in [-1,1]^A

  void add_transition(const Eigen::VectorXd& obs, const Eigen::VectorXd& act, double reward);

  struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double alpha = 0.0;
    double mean_logp = 0.0;
  };
  /// One gradient step on a sampled batch (critics, actor, temperature).
  UpdateStats update();
  /// Critic-only regression step on a caller-chosen batch; exposed for the
  /// frozen-buffer convergence property.
  double update_critics(const ReplayBuffer::Batch& batch);

  const GaussianPolicy& policy() const { return actor_; }
  GaussianPolicy& policy() { return actor_; }
  const ReplayBuffer& replay() const { return replay_; }
  ReplayBuffer& replay() { return replay_; }
  double alpha() const { return std::exp(log_alpha_); }
  const SacConfig& config() const { return cfg_; }
  long updates_done() const { return updates_; }

  void save(const std::string& path) const;  ///< nets, moments, rng, counters
  static SacLearner load(const std::string& path);

 private:
  SacConfig cfg_;
  GaussianPolicy actor_;
  nn::DenseNet critic1_, critic2_;
  nn::Adam actor_adam_, critic1_adam_, critic2_adam_, alpha_adam_;
  double log_alpha_ = 0.0;
  Rng rng_{0};
  long updates_ = 0;
  ReplayBuffer replay_{1, 1, 1};

  friend struct SacLearnerAccess;
};

struct CurvePoint {
  int episode = 0;
  double success_rate_pct = 0.0;
  double avg_signed_dist_cm = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
};

struct SacTrainResult {
  SacLearner learner;
  std::vector<CurvePoint> curve;
  int episodes_run = 0;
};

/// Drive the episode loop: warmup with uniform actions, then one stochastic
/// episode + updates_per_episode gradient steps per episode, evaluating the
/// deterministic policy every eval_every episodes. Deterministic per seed.
/// `start_episode` > 0 continues the episode counter (resume).
SacTrainResult sac_train(OneShotEnv& env, const SacConfig& cfg, SacLearner learner = {},
                         int start_episode = 0);

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path);

}  // namespace dlo::policy
