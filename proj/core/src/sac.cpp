#include "dlo/policy/sac.hpp"

#include <cmath>

#include "json_io.hpp"

namespace dlo::policy {

using nlohmann::json;

namespace {
constexpr double kHalfLog2Pi = 0.9189385332046727417803297364056176;
constexpr double kSquashEps = 1e-6;
}  // namespace

GaussianPolicy::GaussianPolicy(int obs_dim, const std::vector<int>& hidden, int action_dim,
                               Rng& rng)
    : action_dim_(action_dim) {
  std::vector<int> widths{obs_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(2 * action_dim);
  std::vector<nn::Activation> acts(widths.size() - 1, nn::Activation::tanh_act);
  acts.back() = nn::Activation::identity;
  trunk_ = nn::DenseNet(widths, acts, rng);
}

GaussianPolicy::Sample GaussianPolicy::sample(const Eigen::MatrixXd& obs, Rng& rng) const {
  Sample s;
  const Eigen::MatrixXd out = trunk_.forward(obs, s.cache);
  const int a_dim = action_dim_;
  s.mean = out.leftCols(a_dim);
  s.raw_log_std = out.rightCols(a_dim);
  s.log_std = s.raw_log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  s.eps.resize(obs.rows(), a_dim);
  for (Eigen::Index r = 0; r < s.eps.rows(); ++r)
    for (Eigen::Index c = 0; c < s.eps.cols(); ++c) s.eps(r, c) = rng.normal();

  const Eigen::ArrayXXd sigma = s.log_std.array().exp();
  const Eigen::ArrayXXd x = s.mean.array() + sigma * s.eps.array();
  const Eigen::ArrayXXd a = x.tanh();
  s.action = a.matrix();

  // log pi = sum_d [ -eps^2/2 - log_std - log sqrt(2 pi) - log(1 - a^2 + eps) ]
  const Eigen::ArrayXXd per_dim = -0.5 * s.eps.array().square() - s.log_std.array() -
                                  kHalfLog2Pi - (1.0 - a.square() + kSquashEps).log();
  s.logp = per_dim.rowwise().sum().matrix();
  return s;
}

Eigen::VectorXd GaussianPolicy::act_deterministic(const Eigen::VectorXd& obs) const {
  Eigen::MatrixXd row(1, obs.size());
  row.row(0) = obs.transpose();
  const Eigen::MatrixXd out = trunk_.forward(row);
  return out.leftCols(action_dim_).row(0).array().tanh().matrix().transpose();
}

void SacConfig::validate() const {
  if (gamma < 0 || gamma > 1) throw ValidationError("SacConfig: gamma must be in [0, 1]");
  if (episodes < batch) throw ValidationError("SacConfig: episode budget must cover one batch");
  if (batch < 1 || warmup < batch)
    throw ValidationError("SacConfig: warmup must supply at least one batch");
  if (replay_capacity < batch) throw ValidationError("SacConfig: replay too small for a batch");
  if (lr <= 0) throw ValidationError("SacConfig: lr must be > 0");
}

ReplayBuffer::ReplayBuffer(int capacity, int obs_dim, int act_dim)
    : obs_(capacity, obs_dim), act_(capacity, act_dim), rew_(capacity) {}

void ReplayBuffer::add(const Eigen::VectorXd& obs, const Eigen::VectorXd& act, double reward) {
  obs_.row(next_) = obs.transpose();
  act_.row(next_) = act.transpose();
  rew_[next_] = reward;
  next_ = (next_ + 1) % static_cast<int>(obs_.rows());
  size_ = std::min<int>(size_ + 1, static_cast<int>(obs_.rows()));
}

ReplayBuffer::Batch ReplayBuffer::sample(int batch, Rng& rng) const {
  if (size_ < 1) throw ValidationError("ReplayBuffer::sample on empty buffer");
  Batch b;
  b.obs.resize(batch, obs_.cols());
  b.act.resize(batch, act_.cols());
  b.rew.resize(batch);
  for (int k = 0; k < batch; ++k) {
    const int i = rng.uniform_int(0, size_ - 1);
    b.obs.row(k) = obs_.row(i);
    b.act.row(k) = act_.row(i);
    b.rew[k] = rew_[i];
  }
  return b;
}

ReplayBuffer::Batch ReplayBuffer::all() const {
  Batch b;
  b.obs = obs_.topRows(size_);
  b.act = act_.topRows(size_);
  b.rew = rew_.head(size_);
  return b;
}

void ReplayBuffer::save_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open replay file for writing: " + path);
  for (int i = 0; i < size_; ++i) {
    json line{{"obs", std::vector<double>(obs_.row(i).begin(), obs_.row(i).end())},
              {"act", std::vector<double>(act_.row(i).begin(), act_.row(i).end())},
              {"rew", rew_[i]}};
    out << line.dump() << "\n";
  }
}

void ReplayBuffer::load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const auto o = j.at("obs").get<std::vector<double>>();
    const auto a = j.at("act").get<std::vector<double>>();
    add(Eigen::Map<const Eigen::VectorXd>(o.data(), o.size()),
        Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()), j.at("rew").get<double>());
  }
}

SacLearner::SacLearner(int obs_dim, const SacConfig& cfg)
    : cfg_(cfg),
      rng_(Rng::stream(cfg.seed, "sac/learner")),
      replay_(cfg.replay_capacity, obs_dim, 7) {
  cfg_.validate();
  Rng init_rng = Rng::stream(cfg.seed, "sac/init");
  actor_ = GaussianPolicy(obs_dim, cfg.actor_hidden, 7, init_rng);

  std::vector<int> cw{obs_dim + 7};
  cw.insert(cw.end(), cfg.critic_hidden.begin(), cfg.critic_hidden.end());
  cw.push_back(1);
  std::vector<nn::Activation> acts(cw.size() - 1, nn::Activation::tanh_act);
  acts.back() = nn::Activation::identity;
  critic1_ = nn::DenseNet(cw, acts, init_rng);
  critic2_ = nn::DenseNet(cw, acts, init_rng);

  log_alpha_ = std::log(cfg.init_alpha);
  const nn::AdamConfig ac{cfg.lr, 0.9, 0.999, 1e-8};
  actor_adam_ = nn::Adam(ac);
  critic1_adam_ = nn::Adam(ac);
  critic2_adam_ = nn::Adam(ac);
  alpha_adam_ = nn::Adam(ac);
  actor_adam_.init(actor_.trunk().params());
  critic1_adam_.init(critic1_.params());
  critic2_adam_.init(critic2_.params());
  alpha_adam_.init({{"log_alpha", &log_alpha_, 1, 1}});
}

Eigen::VectorXd SacLearner::act(const Eigen::VectorXd& obs) {
  Eigen::MatrixXd row(1, obs.size());
  row.row(0) = obs.transpose();
  return actor_.sample(row, rng_).action.row(0).transpose();
}

Eigen::VectorXd SacLearner::act_deterministic(const Eigen::VectorXd& obs) const {
  return actor_.act_deterministic(obs);
}

Eigen::VectorXd SacLearner::warmup_action() {
  Eigen::VectorXd a(7);
  for (int i = 0; i < 7; ++i) a[i] = rng_.uniform(-1.0, 1.0);
  return a;
}

void SacLearner::add_transition(const Eigen::VectorXd& obs, const Eigen::VectorXd& act,
                                double reward) {
  replay_.add(obs, act, reward);
}

double SacLearner::update_critics(const ReplayBuffer::Batch& batch) {
  const Eigen::Index b = batch.obs.rows();
  Eigen::MatrixXd input(b, batch.obs.cols() + batch.act.cols());
  input << batch.obs, batch.act;

  double loss_sum = 0.0;
  for (nn::DenseNet* critic : {&critic1_, &critic2_}) {
    nn::DenseNet::Cache cache;
    const Eigen::MatrixXd q = critic->forward(input, cache);
    const Eigen::VectorXd err = q.col(0) - batch.rew;  // one-step target: y = r
    loss_sum += err.squaredNorm() / static_cast<double>(b);
    const Eigen::MatrixXd dout = (2.0 / static_cast<double>(b)) * err;
    nn::DenseNet::Grads grads = critic->backward(cache, dout);
    auto gv = nn::DenseNet::grad_views(grads);
    (critic == &critic1_ ? critic1_adam_ : critic2_adam_).step(critic->params(), gv);
  }
  return loss_sum / 2.0;
}

SacLearner::UpdateStats SacLearner::update() {
  UpdateStats stats;
  const ReplayBuffer::Batch batch = replay_.sample(cfg_.batch, rng_);
  const Eigen::Index b = batch.obs.rows();

  stats.critic_loss = update_critics(batch);

  // Actor: maximize min(Q1, Q2) - alpha log pi with a fresh squashed sample.
  const GaussianPolicy::Sample smp = actor_.sample(batch.obs, rng_);
  Eigen::MatrixXd qin(b, batch.obs.cols() + 7);
  qin << batch.obs, smp.action;

  nn::DenseNet::Cache c1, c2;
  const Eigen::VectorXd q1 = critic1_.forward(qin, c1).col(0);
  const Eigen::VectorXd q2 = critic2_.forward(qin, c2).col(0);

  Eigen::MatrixXd pick1 = Eigen::MatrixXd::Zero(b, 1), pick2 = Eigen::MatrixXd::Zero(b, 1);
  for (Eigen::Index r = 0; r < b; ++r)
    (q1[r] <= q2[r] ? pick1 : pick2)(r, 0) = 1.0;
  const Eigen::MatrixXd dq1 = critic1_.backward(c1, pick1).input;
  const Eigen::MatrixXd dq2 = critic2_.backward(c2, pick2).input;
  const Eigen::MatrixXd dq_da = (dq1 + dq2).rightCols(7);  // d qmin / d action

  const double alpha_now = std::exp(log_alpha_);
  const Eigen::ArrayXXd a = smp.action.array();
  const Eigen::ArrayXXd one_m_a2 = 1.0 - a.square();
  const Eigen::ArrayXXd squash_term = 2.0 * a * one_m_a2 / (one_m_a2 + kSquashEps);
  const Eigen::ArrayXXd sigma_eps = smp.log_std.array().exp() * smp.eps.array();

  const double invB = 1.0 / static_cast<double>(b);
  const Eigen::ArrayXXd dL_dmean =
      invB * (alpha_now * squash_term - dq_da.array() * one_m_a2);
  Eigen::ArrayXXd dL_dlogstd =
      invB * (alpha_now * (squash_term * sigma_eps - 1.0) - dq_da.array() * one_m_a2 * sigma_eps);
  // Hard clamp on log-std: no gradient outside the active range.
  const Eigen::ArrayXXd clamp_mask =
      ((smp.raw_log_std.array() > GaussianPolicy::kLogStdMin) &&
       (smp.raw_log_std.array() < GaussianPolicy::kLogStdMax))
          .cast<double>();
  dL_dlogstd *= clamp_mask;

  Eigen::MatrixXd dout(b, 14);
  dout << dL_dmean.matrix(), dL_dlogstd.matrix();
  nn::DenseNet::Grads agrads = actor_.trunk().backward(smp.cache, dout);
  auto agv = nn::DenseNet::grad_views(agrads);
  actor_adam_.step(actor_.trunk().params(), agv);

  stats.mean_logp = smp.logp.mean();
  stats.actor_loss = (alpha_now * smp.logp.array() - q1.cwiseMin(q2).array()).mean();

  // Temperature: push mean log pi toward the entropy target.
  const double dalpha = -(stats.mean_logp + cfg_.target_entropy);
  double g = dalpha;
  alpha_adam_.step({{"log_alpha", &log_alpha_, 1, 1}}, {{"log_alpha_grad", &g, 1, 1}});
  stats.alpha = std::exp(log_alpha_);

  if (!std::isfinite(stats.critic_loss) || !std::isfinite(stats.actor_loss) ||
      !std::isfinite(log_alpha_))
    throw TrainingDiverged("sac update produced non-finite loss", static_cast<int>(updates_));
  ++updates_;
  return stats;
}

SacTrainResult sac_train(OneShotEnv& env, const SacConfig& cfg, SacLearner learner,
                         int start_episode) {
  cfg.validate();
  SacTrainResult result;
  if (learner.policy().obs_dim() == 0) learner = SacLearner(env.feature_dim(), cfg);
  if (learner.policy().obs_dim() != env.feature_dim())
    throw ValidationError("sac_train: learner/env feature width mismatch");

  SacLearner::UpdateStats last_stats;
  for (int ep = start_episode; ep < cfg.episodes; ++ep) {
    const Eigen::VectorXd feats = env.reset(Rng::stream_seed(cfg.seed, "sac/episode", ep));
    const Eigen::VectorXd action =
        ep < cfg.warmup ? learner.warmup_action() : learner.act(feats);
    const double reward = env.step(action);
    learner.add_transition(feats, action, reward);

    if (ep >= cfg.warmup) {
      try {
        for (int u = 0; u < cfg.updates_per_episode; ++u) last_stats = learner.update();
      } catch (const TrainingDiverged&) {
        throw TrainingDiverged("sac training diverged", ep);
      }
    }

    if ((ep + 1) % cfg.eval_every == 0) {
      int successes = 0;
      double dist_sum = 0.0;
      for (int k = 0; k < cfg.eval_episodes; ++k) {
        const Eigen::VectorXd ef = env.reset(Rng::stream_seed(cfg.seed, "sac/eval", k));
        env.step(learner.act_deterministic(ef));
        successes += env.last_success() ? 1 : 0;
        dist_sum += env.last_signed_distance();
      }
      CurvePoint pt;
      pt.episode = ep + 1;
      pt.success_rate_pct = 100.0 * successes / std::max(1, cfg.eval_episodes);
      pt.avg_signed_dist_cm = 100.0 * dist_sum / std::max(1, cfg.eval_episodes);
      pt.critic_loss = last_stats.critic_loss;
      pt.actor_loss = last_stats.actor_loss;
      pt.alpha = last_stats.alpha;
      result.curve.push_back(pt);
    }
    result.episodes_run = ep + 1;
  }
  result.learner = std::move(learner);
  return result;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open curve csv for writing: " + path);
  out << "episode,success_rate_pct,avg_signed_dist_cm,critic_loss,actor_loss,alpha\n";
  char buf[256];
  for (const CurvePoint& p : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.6g,%.6g,%.6g,%.6g,%.6g\n", p.episode,
                  p.success_rate_pct, p.avg_signed_dist_cm, p.critic_loss, p.actor_loss, p.alpha);
    out << buf;
  }
}

namespace {

json adam_json(const nn::Adam& a) {
  return json{{"m", a.first_moments()}, {"v", a.second_moments()}, {"t", a.step_count()}};
}

void adam_restore(nn::Adam& a, const json& j) {
  a.restore(j.at("m").get<std::vector<double>>(), j.at("v").get<std::vector<double>>(),
            j.at("t").get<long>());
}

json sac_config_json(const SacConfig& c) {
  return json{{"actor_hidden", c.actor_hidden},
              {"critic_hidden", c.critic_hidden},
              {"lr", c.lr},
              {"batch", c.batch},
              {"replay_capacity", c.replay_capacity},
              {"tau_smooth", c.tau_smooth},
              {"gamma", c.gamma},
              {"init_alpha", c.init_alpha},
              {"target_entropy", c.target_entropy},
              {"episodes", c.episodes},
              {"warmup", c.warmup},
              {"updates_per_episode", c.updates_per_episode},
              {"eval_every", c.eval_every},
              {"eval_episodes", c.eval_episodes},
              {"seed", c.seed}};
}

SacConfig sac_config_from_json(const json& j) {
  SacConfig c;
  c.actor_hidden = j.at("actor_hidden").get<std::vector<int>>();
  c.critic_hidden = j.at("critic_hidden").get<std::vector<int>>();
  c.lr = j.at("lr").get<double>();
  c.batch = j.at("batch").get<int>();
  c.replay_capacity = j.at("replay_capacity").get<int>();
  c.tau_smooth = j.at("tau_smooth").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.init_alpha = j.at("init_alpha").get<double>();
  c.target_entropy = j.at("target_entropy").get<double>();
  c.episodes = j.at("episodes").get<int>();
  c.warmup = j.at("warmup").get<int>();
  c.updates_per_episode = j.at("updates_per_episode").get<int>();
  c.eval_every = j.at("eval_every").get<int>();
  c.eval_episodes = j.at("eval_episodes").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void SacLearner::save(const std::string& path) const {
  json j{{"format", "dloflex-sac-v1"},
         {"config", sac_config_json(cfg_)},
         {"obs_dim", actor_.obs_dim()},
         {"actor", nn::detail::dense_to_json(actor_.trunk())},
         {"critic1", nn::detail::dense_to_json(critic1_)},
         {"critic2", nn::detail::dense_to_json(critic2_)},
         {"actor_adam", adam_json(actor_adam_)},
         {"critic1_adam", adam_json(critic1_adam_)},
         {"critic2_adam", adam_json(critic2_adam_)},
         {"alpha_adam", adam_json(alpha_adam_)},
         {"log_alpha", log_alpha_},
         {"updates", updates_},
         {"rng", rng_.save_state()}};
  nn::detail::write_text_file(path, j.dump() + "\n");
}

SacLearner SacLearner::load(const std::string& path) {
  const json j = json::parse(nn::detail::read_text_file(path));
  if (j.at("format").get<std::string>() != "dloflex-sac-v1")
    throw ValidationError("not a sac checkpoint: " + path);
  const SacConfig cfg = sac_config_from_json(j.at("config"));
  SacLearner learner(j.at("obs_dim").get<int>(), cfg);
  learner.actor_.trunk() = nn::detail::dense_from_json(j.at("actor"));
  learner.critic1_ = nn::detail::dense_from_json(j.at("critic1"));
  learner.critic2_ = nn::detail::dense_from_json(j.at("critic2"));
  adam_restore(learner.actor_adam_, j.at("actor_adam"));
  adam_restore(learner.critic1_adam_, j.at("critic1_adam"));
  adam_restore(learner.critic2_adam_, j.at("critic2_adam"));
  adam_restore(learner.alpha_adam_, j.at("alpha_adam"));
  learner.log_alpha_ = j.at("log_alpha").get<double>();
  learner.updates_ = j.at("updates").get<long>();
  learner.rng_.restore_state(j.at("rng").get<std::string>());
  return learner;
}

}  // namespace dlo::policy
