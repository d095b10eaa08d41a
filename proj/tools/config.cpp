#include "config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "dlo/policy/sac.hpp"

namespace dlo::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw ValidationError("unknown config key '" + key + "' in " + where);
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::validate(bool allow_out_of_range) const {
  const auto fail = [&](const std::string& msg) {
    if (!allow_out_of_range) throw ValidationError(msg + " (pass --allow-out-of-range to force)");
  };
  if (flex_data.sweep_lo < 0.0 || flex_data.sweep_hi > 1.0 ||
      flex_data.sweep_lo > flex_data.sweep_hi)
    fail("flex_data sweep range must sit inside [0, 1]");
  if (flex_data.lambda_lo < 0.85 - 1e-12 || flex_data.lambda_hi > 1.0 + 1e-12)
    fail("flex_data lambda range must sit inside [0.85, 1.0]");
  if (flex_data.sweep_levels < 1 || flex_data.per_sweep_augments < 0)
    throw ValidationError("flex_data counts must be non-negative");
  if (env.radius_lo < 0.01 - 1e-12 || env.radius_hi > 0.025 + 1e-12)
    fail("env ring radius range must sit inside [1 cm, 2.5 cm]");
  if (env.angle_lo < 0.0 || env.angle_hi > 2.356194490192344928846982537459627163 + 1e-12)
    fail("env ring angle range must sit inside [0, 3pi/4]");
  if (env.ring_square_half > 0.05 + 1e-12 || env.rope_offset_half > 0.05 + 1e-12)
    fail("env randomization boxes must sit inside the 10 cm square");
  if (eval.radius < 0.01 - 1e-12 || eval.radius > 0.025 + 1e-12)
    fail("eval radius must sit inside [1 cm, 2.5 cm]");
  if (eval.f_mode != "truth" && eval.f_mode != "estimated" && eval.f_mode != "random")
    throw ValidationError("eval f_mode must be truth | estimated | random");
  for (const std::string& r : train_policy.regimes)
    if (r != "rand" && r != "fix") throw ValidationError("regimes must be 'rand' or 'fix'");
  if (sac.episodes < 1 || sac.warmup < 1) throw ValidationError("sac budget must be positive");
}

env::EnvConfig ExperimentConfig::make_env_config(bool fixed_theta, bool provide_f) const {
  env::EnvConfig e;
  e.n = env.n;
  e.radius_lo = env.radius_lo;
  e.radius_hi = env.radius_hi;
  e.angle_lo = env.angle_lo;
  e.angle_hi = env.angle_hi;
  e.ring_square_half = env.ring_square_half;
  e.rope_offset_half = env.rope_offset_half;
  e.sweep_lo = env.sweep_lo;
  e.sweep_hi = env.sweep_hi;
  e.sweep_levels = env.sweep_levels;
  e.fixed_theta = fixed_theta;
  e.provide_f = provide_f;
  return e;
}

policy::SacConfig ExperimentConfig::make_sac_config(std::uint64_t run_seed) const {
  policy::SacConfig c;
  c.actor_hidden = sac.actor_hidden;
  c.critic_hidden = sac.critic_hidden;
  c.lr = sac.lr;
  c.batch = sac.batch;
  c.replay_capacity = sac.replay_capacity;
  c.tau_smooth = sac.tau_smooth;
  c.gamma = sac.gamma;
  c.episodes = sac.episodes;
  c.warmup = sac.warmup;
  c.updates_per_episode = sac.updates_per_episode;
  c.eval_every = sac.eval_every;
  c.eval_episodes = sac.eval_episodes;
  c.seed = run_seed;
  return c;
}

ExperimentConfig profile_config(const std::string& profile) {
  ExperimentConfig cfg;
  if (profile == "desk") return cfg;
  if (profile == "paper") {
    cfg.sac.episodes = 40000;
    cfg.eval.radius = 0.01;
    cfg.eval.episodes = 100;
    return cfg;
  }
  throw ValidationError("unknown profile: " + profile);
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig cfg = base;
  reject_unknown(j, {"seed", "out_dir", "flex_data", "estimator", "env", "sac", "train_policy",
                     "eval"},
                 "top level");
  maybe(j, "seed", cfg.seed);
  maybe(j, "out_dir", cfg.out_dir);

  if (j.contains("flex_data")) {
    const json& s = j.at("flex_data");
    reject_unknown(s,
                   {"sweep_levels", "sweep_lo", "sweep_hi", "per_sweep_augments", "val_augments",
                    "test_augments", "lambda_lo", "lambda_hi", "noise_std"},
                   "flex_data");
    maybe(s, "sweep_levels", cfg.flex_data.sweep_levels);
    maybe(s, "sweep_lo", cfg.flex_data.sweep_lo);
    maybe(s, "sweep_hi", cfg.flex_data.sweep_hi);
    maybe(s, "per_sweep_augments", cfg.flex_data.per_sweep_augments);
    maybe(s, "val_augments", cfg.flex_data.val_augments);
    maybe(s, "test_augments", cfg.flex_data.test_augments);
    maybe(s, "lambda_lo", cfg.flex_data.lambda_lo);
    maybe(s, "lambda_hi", cfg.flex_data.lambda_hi);
    maybe(s, "noise_std", cfg.flex_data.noise_std);
  }
  if (j.contains("estimator")) {
    const json& s = j.at("estimator");
    reject_unknown(
        s, {"gnn_hidden", "mlp_hidden", "epochs", "batch", "lr", "train_mlp", "train_gnn_noaug"},
        "estimator");
    maybe(s, "gnn_hidden", cfg.estimator.gnn_hidden);
    maybe(s, "mlp_hidden", cfg.estimator.mlp_hidden);
    maybe(s, "epochs", cfg.estimator.epochs);
    maybe(s, "batch", cfg.estimator.batch);
    maybe(s, "lr", cfg.estimator.lr);
    maybe(s, "train_mlp", cfg.estimator.train_mlp);
    maybe(s, "train_gnn_noaug", cfg.estimator.train_gnn_noaug);
  }
  if (j.contains("env")) {
    const json& s = j.at("env");
    reject_unknown(s,
                   {"n", "radius_lo", "radius_hi", "angle_lo", "angle_hi", "ring_square_half",
                    "rope_offset_half", "sweep_lo", "sweep_hi", "sweep_levels"},
                   "env");
    maybe(s, "n", cfg.env.n);
    maybe(s, "radius_lo", cfg.env.radius_lo);
    maybe(s, "radius_hi", cfg.env.radius_hi);
    maybe(s, "angle_lo", cfg.env.angle_lo);
    maybe(s, "angle_hi", cfg.env.angle_hi);
    maybe(s, "ring_square_half", cfg.env.ring_square_half);
    maybe(s, "rope_offset_half", cfg.env.rope_offset_half);
    maybe(s, "sweep_lo", cfg.env.sweep_lo);
    maybe(s, "sweep_hi", cfg.env.sweep_hi);
    maybe(s, "sweep_levels", cfg.env.sweep_levels);
  }
  if (j.contains("sac")) {
    const json& s = j.at("sac");
    reject_unknown(s,
                   {"actor_hidden", "critic_hidden", "lr", "batch", "replay_capacity",
                    "tau_smooth", "gamma", "episodes", "warmup", "updates_per_episode",
                    "eval_every", "eval_episodes"},
                   "sac");
    maybe(s, "actor_hidden", cfg.sac.actor_hidden);
    maybe(s, "critic_hidden", cfg.sac.critic_hidden);
    maybe(s, "lr", cfg.sac.lr);
    maybe(s, "batch", cfg.sac.batch);
    maybe(s, "replay_capacity", cfg.sac.replay_capacity);
    maybe(s, "tau_smooth", cfg.sac.tau_smooth);
    maybe(s, "gamma", cfg.sac.gamma);
    maybe(s, "episodes", cfg.sac.episodes);
    maybe(s, "warmup", cfg.sac.warmup);
    maybe(s, "updates_per_episode", cfg.sac.updates_per_episode);
    maybe(s, "eval_every", cfg.sac.eval_every);
    maybe(s, "eval_episodes", cfg.sac.eval_episodes);
  }
  if (j.contains("train_policy")) {
    const json& s = j.at("train_policy");
    reject_unknown(s, {"regimes", "f_settings", "seeds"}, "train_policy");
    maybe(s, "regimes", cfg.train_policy.regimes);
    if (s.contains("f_settings"))
      cfg.train_policy.f_settings = s.at("f_settings").get<std::vector<bool>>();
    maybe(s, "seeds", cfg.train_policy.seeds);
  }
  if (j.contains("eval")) {
    const json& s = j.at("eval");
    reject_unknown(
        s, {"episodes", "radius", "f_mode", "vb_alpha", "vb_beta", "dataset", "estimator"},
        "eval");
    maybe(s, "episodes", cfg.eval.episodes);
    maybe(s, "radius", cfg.eval.radius);
    maybe(s, "f_mode", cfg.eval.f_mode);
    maybe(s, "vb_alpha", cfg.eval.vb_alpha);
    maybe(s, "vb_beta", cfg.eval.vb_beta);
    maybe(s, "dataset", cfg.eval.dataset);
    maybe(s, "estimator", cfg.eval.estimator);
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& c) {
  const json j{
      {"seed", c.seed},
      {"out_dir", c.out_dir},
      {"flex_data",
       {{"sweep_levels", c.flex_data.sweep_levels},
        {"sweep_lo", c.flex_data.sweep_lo},
        {"sweep_hi", c.flex_data.sweep_hi},
        {"per_sweep_augments", c.flex_data.per_sweep_augments},
        {"val_augments", c.flex_data.val_augments},
        {"test_augments", c.flex_data.test_augments},
        {"lambda_lo", c.flex_data.lambda_lo},
        {"lambda_hi", c.flex_data.lambda_hi},
        {"noise_std", c.flex_data.noise_std}}},
      {"estimator",
       {{"gnn_hidden", c.estimator.gnn_hidden},
        {"mlp_hidden", c.estimator.mlp_hidden},
        {"epochs", c.estimator.epochs},
        {"batch", c.estimator.batch},
        {"lr", c.estimator.lr},
        {"train_mlp", c.estimator.train_mlp},
        {"train_gnn_noaug", c.estimator.train_gnn_noaug}}},
      {"env",
       {{"n", c.env.n},
        {"radius_lo", c.env.radius_lo},
        {"radius_hi", c.env.radius_hi},
        {"angle_lo", c.env.angle_lo},
        {"angle_hi", c.env.angle_hi},
        {"ring_square_half", c.env.ring_square_half},
        {"rope_offset_half", c.env.rope_offset_half},
        {"sweep_lo", c.env.sweep_lo},
        {"sweep_hi", c.env.sweep_hi},
        {"sweep_levels", c.env.sweep_levels}}},
      {"sac",
       {{"actor_hidden", c.sac.actor_hidden},
        {"critic_hidden", c.sac.critic_hidden},
        {"lr", c.sac.lr},
        {"batch", c.sac.batch},
        {"replay_capacity", c.sac.replay_capacity},
        {"tau_smooth", c.sac.tau_smooth},
        {"gamma", c.sac.gamma},
        {"episodes", c.sac.episodes},
        {"warmup", c.sac.warmup},
        {"updates_per_episode", c.sac.updates_per_episode},
        {"eval_every", c.sac.eval_every},
        {"eval_episodes", c.sac.eval_episodes}}},
      {"train_policy",
       {{"regimes", c.train_policy.regimes},
        {"f_settings", c.train_policy.f_settings},
        {"seeds", c.train_policy.seeds}}},
      {"eval",
       {{"episodes", c.eval.episodes},
        {"radius", c.eval.radius},
        {"f_mode", c.eval.f_mode},
        {"vb_alpha", c.eval.vb_alpha},
        {"vb_beta", c.eval.vb_beta},
        {"dataset", c.eval.dataset},
        {"estimator", c.eval.estimator}}}};
  return j.dump(2);
}

}  // namespace dlo::cli
