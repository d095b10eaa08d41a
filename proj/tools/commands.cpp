#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "dlo/flex/dataset.hpp"
#include "dlo/nn/estimator.hpp"
#include "dlo/policy/baseline.hpp"
#include "dlo/policy/evaluate.hpp"
#include "dlo/policy/sac.hpp"
#include "dlo/stats.hpp"

namespace dlo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_run_meta(const GlobalArgs& args, const std::string& command) {
  fs::create_directories(args.cfg.out_dir);
  json meta{{"command", command},
            {"allow_out_of_range", args.allow_out_of_range},
            {"config", json::parse(config_to_json(args.cfg))}};
  std::ofstream out(join(args.cfg.out_dir, "run_meta_" + command + ".json"));
  out << meta.dump(2) << "\n";
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i)
    v.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1.0));
  return v;
}

flex::GenOptions gen_options(const ExperimentConfig& cfg) {
  flex::GenOptions opts;
  opts.val_augments = cfg.flex_data.val_augments;
  opts.test_augments = cfg.flex_data.test_augments;
  opts.augment.lambda_lo = cfg.flex_data.lambda_lo;
  opts.augment.lambda_hi = cfg.flex_data.lambda_hi;
  opts.augment.noise_std = cfg.flex_data.noise_std;
  return opts;
}

std::string dataset_path(const ExperimentConfig& cfg) {
  return cfg.eval.dataset.empty() ? join(cfg.out_dir, "flex_dataset.jsonl") : cfg.eval.dataset;
}

std::string estimator_path(const ExperimentConfig& cfg) {
  return cfg.eval.estimator.empty() ? join(cfg.out_dir, "estimator_gnn.json")
                                    : cfg.eval.estimator;
}

void write_loss_csv(const nn::TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  out << "epoch,train_mse,val_mse\n";
  char buf[128];
  for (std::size_t e = 0; e < report.train_mse.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", e, report.train_mse[e],
                  report.val_mse[e]);
    out << buf;
  }
}

struct DppRow {
  std::string method;
  double mean_mm = 0.0;
  double std_mm = 0.0;
  int count = 0;
};

template <typename PredictFn>
DppRow eval_dpp(const std::string& method, const flex::FlexDataset& ds, PredictFn&& predict) {
  std::vector<double> dists;
  for (const flex::FlexSample& s : ds.samples) {
    if (s.split != flex::Split::test) continue;
    const double f_hat = predict(s.curve);
    const flex::FlexSample& match = flex::nearest_flex_match(f_hat, ds);
    dists.push_back(1000.0 * flex::point_point_distance(s.curve, match.curve));
  }
  if (dists.empty()) throw ValidationError("dataset has no test split samples");
  return {method, mean(dists), stddev(dists), static_cast<int>(dists.size())};
}

void write_dpp_report(const std::vector<DppRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << "method,dpp_mean_mm,dpp_std_mm,count\n";
  char buf[160];
  for (const DppRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6g,%.6g,%d\n", r.method.c_str(), r.mean_mm, r.std_mm,
                  r.count);
    out << buf;
  }
}

double analytic_predict(const flex::ProjectedCurve& curve) {
  try {
    return flex::compute_flexibility(curve, 0);
  } catch (const flex::DegenerateGeometry&) {
    return 0.0;
  }
}

std::string policy_run_name(const std::string& regime, bool with_f, std::uint64_t seed) {
  return "policy_" + regime + (with_f ? "_f" : "_nof") + "_s" + std::to_string(seed);
}

}  // namespace

int cmd_gen_flex_data(const GlobalArgs& args) {
  const ExperimentConfig& cfg = args.cfg;
  const std::vector<double> sweep =
      linspace(cfg.flex_data.sweep_lo, cfg.flex_data.sweep_hi, cfg.flex_data.sweep_levels);
  std::printf("sweep: %d values in [%.3f, %.3f], %d train augments per value\n",
              cfg.flex_data.sweep_levels, cfg.flex_data.sweep_lo, cfg.flex_data.sweep_hi,
              cfg.flex_data.per_sweep_augments);
  if (args.dry_run) {
    std::printf("dry run: nothing written\n");
    return 0;
  }
  write_run_meta(args, "gen-flex-data");

  const flex::FlexDataset ds = flex::generate_flex_dataset(
      sweep, cfg.flex_data.per_sweep_augments, cfg.seed, gen_options(cfg));
  flex::save_jsonl(ds, dataset_path(cfg));

  std::printf("train: %d augmented + %d clean, val: %d, test: %d, skipped sweep values: %d\n",
              ds.count(flex::Split::train, true), ds.count(flex::Split::train, false),
              ds.count(flex::Split::val), ds.count(flex::Split::test), ds.meta.skipped);
  std::printf("wrote %s\n", dataset_path(cfg).c_str());
  return 0;
}

int cmd_train_flex(const GlobalArgs& args) {
  const ExperimentConfig& cfg = args.cfg;
  if (args.dry_run) {
    std::printf("dry run: would train on %s\n", dataset_path(cfg).c_str());
    return 0;
  }
  write_run_meta(args, "train-flex");
  const flex::FlexDataset ds = flex::load_jsonl(dataset_path(cfg));

  nn::TrainOptions opts;
  opts.epochs = cfg.estimator.epochs;
  opts.batch = cfg.estimator.batch;
  opts.lr = cfg.estimator.lr;

  std::vector<DppRow> rows;
  rows.push_back(eval_dpp("analytic", ds, analytic_predict));

  if (cfg.estimator.train_mlp) {
    Rng rng = Rng::stream(cfg.seed, "estimator/mlp");
    nn::FlexEstimator mlp = nn::FlexEstimator::make_mlp(
        ds.meta.rig.input_n - ds.meta.rig.input_first, cfg.estimator.mlp_hidden, rng);
    opts.seed = Rng::stream_seed(cfg.seed, "estimator/mlp/train");
    const nn::TrainReport rep = mlp.train(ds, opts);
    mlp.save(join(cfg.out_dir, "estimator_mlp.json"));
    write_loss_csv(rep, join(cfg.out_dir, "loss_mlp.csv"));
    rows.push_back(eval_dpp("mlp", ds, [&](const flex::ProjectedCurve& c) { return mlp.predict(c); }));
  }
  if (cfg.estimator.train_gnn_noaug) {
    Rng rng = Rng::stream(cfg.seed, "estimator/gnn_noaug");
    nn::FlexEstimator noaug = nn::FlexEstimator::make_gnn(cfg.estimator.gnn_hidden, rng);
    opts.seed = Rng::stream_seed(cfg.seed, "estimator/gnn_noaug/train");
    const nn::TrainReport rep = noaug.train(ds, opts, /*include_augmented=*/false);
    noaug.save(join(cfg.out_dir, "estimator_gnn_noaug.json"));
    write_loss_csv(rep, join(cfg.out_dir, "loss_gnn_noaug.csv"));
    rows.push_back(
        eval_dpp("gnn_noaug", ds, [&](const flex::ProjectedCurve& c) { return noaug.predict(c); }));
  }
  {
    Rng rng = Rng::stream(cfg.seed, "estimator/gnn");
    nn::FlexEstimator gnn = nn::FlexEstimator::make_gnn(cfg.estimator.gnn_hidden, rng);
    opts.seed = Rng::stream_seed(cfg.seed, "estimator/gnn/train");
    const nn::TrainReport rep = gnn.train(ds, opts);
    gnn.save(estimator_path(cfg));
    write_loss_csv(rep, join(cfg.out_dir, "loss_gnn.csv"));
    rows.push_back(
        eval_dpp("gnn", ds, [&](const flex::ProjectedCurve& c) { return gnn.predict(c); }));
  }

  write_dpp_report(rows, join(cfg.out_dir, "flex_report.csv"));
  for (const DppRow& r : rows)
    std::printf("%-10s d_pp = %.3f +- %.3f mm  (n=%d)\n", r.method.c_str(), r.mean_mm, r.std_mm,
                r.count);
  return 0;
}

int cmd_eval_flex(const GlobalArgs& args) {
  const ExperimentConfig& cfg = args.cfg;
  if (args.dry_run) {
    std::printf("dry run: would evaluate %s on %s\n", estimator_path(cfg).c_str(),
                dataset_path(cfg).c_str());
    return 0;
  }
  write_run_meta(args, "eval-flex");
  const flex::FlexDataset ds = flex::load_jsonl(dataset_path(cfg));

  std::vector<DppRow> rows;
  rows.push_back(eval_dpp("analytic", ds, analytic_predict));
  const auto maybe_row = [&](const std::string& method, const std::string& path) {
    if (!fs::exists(path)) return;
    const nn::FlexEstimator est = nn::FlexEstimator::load(path);
    rows.push_back(
        eval_dpp(method, ds, [&](const flex::ProjectedCurve& c) { return est.predict(c); }));
  };
  maybe_row("mlp", join(cfg.out_dir, "estimator_mlp.json"));
  maybe_row("gnn_noaug", join(cfg.out_dir, "estimator_gnn_noaug.json"));
  maybe_row("gnn", estimator_path(cfg));

  write_dpp_report(rows, join(cfg.out_dir, "flex_report.csv"));
  for (const DppRow& r : rows)
    std::printf("%-10s d_pp = %.3f +- %.3f mm  (n=%d)\n", r.method.c_str(), r.mean_mm, r.std_mm,
                r.count);
  return 0;
}

int cmd_train_policy(const GlobalArgs& args) {
  const ExperimentConfig& cfg = args.cfg;
  if (args.dry_run) {
    std::printf("dry run: %zu regimes x %zu f settings x %zu seeds, %d episodes each\n",
                cfg.train_policy.regimes.size(), cfg.train_policy.f_settings.size(),
                cfg.train_policy.seeds.size(), cfg.sac.episodes);
    return 0;
  }
  write_run_meta(args, "train-policy");

  for (const std::string& regime : cfg.train_policy.regimes) {
    for (bool with_f : cfg.train_policy.f_settings) {
      for (std::uint64_t seed : cfg.train_policy.seeds) {
        const std::string name = policy_run_name(regime, with_f, seed);
        const std::string ckpt = join(cfg.out_dir, name + ".json");
        const std::string progress_path = join(cfg.out_dir, name + ".progress.json");
        const std::string replay_path = join(cfg.out_dir, name + ".replay.jsonl");
        const std::string curve_path = join(cfg.out_dir, name + ".curve.csv");

        int done = 0;
        if (fs::exists(progress_path)) {
          std::ifstream in(progress_path);
          done = json::parse(in).at("episodes_run").get<int>();
        }
        if (done >= cfg.sac.episodes && fs::exists(ckpt)) {
          std::printf("%s: already complete (%d episodes)\n", name.c_str(), done);
          continue;
        }

        policy::SacConfig sac_cfg =
            cfg.make_sac_config(Rng::stream_seed(cfg.seed, "policy/" + name, seed));
        policy::InsertionOneShot env(cfg.make_env_config(regime == "fix", with_f));

        policy::SacLearner learner;
        if (done > 0 && fs::exists(ckpt)) {
          learner = policy::SacLearner::load(ckpt);
          if (fs::exists(replay_path)) learner.replay().load_jsonl(replay_path);
          std::printf("%s: resuming at episode %d\n", name.c_str(), done);
        }
        policy::SacTrainResult result = policy::sac_train(env, sac_cfg, std::move(learner), done);

        result.learner.save(ckpt);
        result.learner.replay().save_jsonl(replay_path);
        {
          std::ofstream out(progress_path);
          out << json{{"episodes_run", result.episodes_run}}.dump() << "\n";
        }
        {
          // append new curve points, keeping one row per eval block
          const bool fresh = done == 0 || !fs::exists(curve_path);
          std::ofstream out(curve_path, fresh ? std::ios::trunc : std::ios::app);
          if (fresh) out << "episode,success_rate_pct,avg_signed_dist_cm,critic_loss,actor_loss,alpha\n";
          char buf[256];
          for (const policy::CurvePoint& p : result.curve) {
            std::snprintf(buf, sizeof(buf), "%d,%.6g,%.6g,%.6g,%.6g,%.6g\n", p.episode,
                          p.success_rate_pct, p.avg_signed_dist_cm, p.critic_loss, p.actor_loss,
                          p.alpha);
            out << buf;
          }
        }
        std::printf("%s: trained to %d episodes\n", name.c_str(), result.episodes_run);
      }
    }
  }
  return 0;
}

int cmd_eval_policy(const GlobalArgs& args) {
  const ExperimentConfig& cfg = args.cfg;
  if (args.dry_run) {
    std::printf("dry run: would evaluate 5 methods x %zu regimes\n",
                cfg.train_policy.regimes.size());
    return 0;
  }
  write_run_meta(args, "eval-policy");

  const flex::FlexDataset ds = flex::load_jsonl(dataset_path(cfg));
  const auto f_range = ds.label_range();
  nn::FlexEstimator estimator;
  bool have_estimator = false;
  if (fs::exists(estimator_path(cfg))) {
    estimator = nn::FlexEstimator::load(estimator_path(cfg));
    have_estimator = true;
  }
  policy::FMode base_mode = policy::FMode::truth;
  if (cfg.eval.f_mode == "estimated") {
    if (!have_estimator) throw ValidationError("estimated f_mode needs " + estimator_path(cfg));
    base_mode = policy::FMode::estimated;
  }

  const policy::VbCoeffs vb{cfg.eval.vb_alpha, cfg.eval.vb_beta};

  struct Row {
    std::string method, regime;
    double success = 0.0, dist = 0.0;
    int seeds = 0;
    std::array<policy::BandMetrics, 3> bands{};
  };
  std::vector<Row> table;

  const auto eval_seeded = [&](const std::string& method, const std::string& regime,
                               const policy::Actor& actor, bool provide_f, policy::FMode mode,
                               const std::vector<std::uint64_t>& seeds) {
    env::EnvConfig env_cfg = cfg.make_env_config(regime == "fix", provide_f);
    env_cfg.radius_lo = env_cfg.radius_hi = cfg.eval.radius;
    Row row;
    row.method = method;
    row.regime = regime;
    std::array<double, 3> band_succ{}, band_dist{};
    std::array<int, 3> band_eps{};
    for (std::uint64_t seed : seeds) {
      policy::EvalOptions opts;
      opts.episodes = cfg.eval.episodes;
      opts.f_mode = mode;
      opts.seed = Rng::stream_seed(cfg.seed, "eval/" + method + "/" + regime, seed);
      opts.estimator = have_estimator ? &estimator : nullptr;
      opts.f_range = f_range;
      opts.episode_log_path = join(cfg.out_dir, "episodes_" + method + "_" + regime + "_s" +
                                                    std::to_string(seed) + ".jsonl");
      const policy::EvalResult res = policy::evaluate(actor, env_cfg, opts);
      row.success += res.overall.success_rate_pct;
      row.dist += res.overall.avg_signed_dist_cm;
      ++row.seeds;
      for (int b = 0; b < 3; ++b) {
        band_succ[b] += res.bands[b].success_rate_pct * res.bands[b].episodes;
        band_dist[b] += res.bands[b].avg_signed_dist_cm * res.bands[b].episodes;
        band_eps[b] += res.bands[b].episodes;
      }
    }
    row.success /= row.seeds;
    row.dist /= row.seeds;
    for (int b = 0; b < 3; ++b) {
      row.bands[b].episodes = band_eps[b];
      if (band_eps[b] > 0) {
        row.bands[b].success_rate_pct = band_succ[b] / band_eps[b];
        row.bands[b].avg_signed_dist_cm = band_dist[b] / band_eps[b];
      }
    }
    table.push_back(row);
  };

  std::vector<policy::GaussianPolicy> with_f_policies, without_f_policies;
  for (const std::string& regime : cfg.train_policy.regimes) {
    // ours w/ f
    std::vector<std::uint64_t> seeds_found;
    for (std::uint64_t seed : cfg.train_policy.seeds) {
      const std::string ckpt = join(cfg.out_dir, policy_run_name(regime, true, seed) + ".json");
      if (!fs::exists(ckpt)) throw ValidationError("missing policy checkpoint: " + ckpt);
      seeds_found.push_back(seed);
    }
    for (std::uint64_t seed : seeds_found) {
      const std::string ckpt = join(cfg.out_dir, policy_run_name(regime, true, seed) + ".json");
      with_f_policies.push_back(policy::SacLearner::load(ckpt).policy());
      eval_seeded("ours_with_f", regime, policy::policy_actor(with_f_policies.back()), true,
                  base_mode, {seed});
      eval_seeded("random_f", regime, policy::policy_actor(with_f_policies.back()), true,
                  policy::FMode::random, {seed});
    }
    for (std::uint64_t seed : cfg.train_policy.seeds) {
      const std::string ckpt = join(cfg.out_dir, policy_run_name(regime, false, seed) + ".json");
      if (!fs::exists(ckpt)) throw ValidationError("missing policy checkpoint: " + ckpt);
      without_f_policies.push_back(policy::SacLearner::load(ckpt).policy());
      eval_seeded("ours_without_f", regime, policy::policy_actor(without_f_policies.back()),
                  false, policy::FMode::truth, {seed});
    }
    const policy::Actor vb_with = [vb](const env::Observation& obs, const env::ActionBounds& b) {
      return policy::visual_baseline_action(obs, b, true, vb);
    };
    const policy::Actor vb_without = [vb](const env::Observation& obs,
                                          const env::ActionBounds& b) {
      return policy::visual_baseline_action(obs, b, false, vb);
    };
    eval_seeded("vb_with_f", regime, vb_with, true, base_mode, {cfg.train_policy.seeds.front()});
    eval_seeded("vb_without_f", regime, vb_without, false, policy::FMode::truth,
                {cfg.train_policy.seeds.front()});
  }

  // collapse per-seed rows into method x regime means for the table
  std::ofstream t1(join(cfg.out_dir, "table1.csv"));
  t1 << "method,regime,success_pct,avg_dist_cm,seed_count\n";
  std::ofstream f9(join(cfg.out_dir, "fig9_bands.csv"));
  f9 << "method,regime,band,success_pct,avg_dist_cm,episodes\n";
  const char* band_names[3] = {"low", "mid", "high"};
  for (const std::string& regime : cfg.train_policy.regimes) {
    for (const char* method :
         {"ours_with_f", "ours_without_f", "vb_with_f", "vb_without_f", "random_f"}) {
      double success = 0.0, dist = 0.0;
      int count = 0;
      std::array<double, 3> bs{}, bd{};
      std::array<int, 3> be{};
      for (const Row& row : table) {
        if (row.method != method || row.regime != regime) continue;
        success += row.success;
        dist += row.dist;
        ++count;
        for (int b = 0; b < 3; ++b) {
          bs[b] += row.bands[b].success_rate_pct * row.bands[b].episodes;
          bd[b] += row.bands[b].avg_signed_dist_cm * row.bands[b].episodes;
          be[b] += row.bands[b].episodes;
        }
      }
      if (count == 0) continue;
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%.6g,%d\n", method, regime.c_str(),
                    success / count, dist / count, count);
      t1 << buf;
      std::printf("%-14s %-5s success %5.1f%%  avg dist %+6.2f cm  (%d seeds)\n", method,
                  regime.c_str(), success / count, dist / count, count);
      for (int b = 0; b < 3; ++b) {
        if (be[b] == 0) continue;
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6g,%.6g,%d\n", method, regime.c_str(),
                      band_names[b], bs[b] / be[b], bd[b] / be[b], be[b]);
        f9 << buf;
      }
    }
  }

  // scripted smoke scenario rides along with every evaluation
  auto [obs, scene] = env::reset(env::oracle_smoke_config(), 2024);
  const env::EpisodeOutcome smoke = env::execute_episode(scene, env::oracle_smoke_action(scene));
  {
    std::ofstream out(join(cfg.out_dir, "oracle_smoke.json"));
    out << json{{"success", smoke.success},
                {"rope_in", smoke.rope_in},
                {"rope_out", smoke.rope_out},
                {"reward", smoke.reward},
                {"signed_endpoint_distance", smoke.signed_endpoint_distance}}
               .dump(2)
        << "\n";
  }
  std::printf("oracle smoke: %s\n", smoke.success ? "PASS" : "FAIL");
  return smoke.success ? 0 : 2;
}

int cmd_oracle_smoke(const GlobalArgs& args) {
  if (args.dry_run) {
    std::printf("dry run: would run the scripted smoke scenario\n");
    return 0;
  }
  auto [obs, scene] = env::reset(env::oracle_smoke_config(), 2024);
  const env::EpisodeOutcome out = env::execute_episode(scene, env::oracle_smoke_action(scene));
  std::printf("rope_in=%d rope_out=%d reward=%.4f signed_dist=%.4f m\n", out.rope_in,
              out.rope_out, out.reward, out.signed_endpoint_distance);
  std::printf("oracle smoke: %s\n", out.success ? "PASS" : "FAIL");
  return out.success ? 0 : 2;
}

}  // namespace dlo::cli
