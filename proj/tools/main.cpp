#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dloflex: deformable-rope insertion simulator and learning toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string profile = "desk";
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  dlo::cli::GlobalArgs args;

  app.add_option("--config", config_path, "JSON config file (strict keys)");
  app.add_option("--profile", profile, "base defaults: desk | paper")->capture_default_str();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "root seed (overrides config)")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_flag("--dry-run", args.dry_run, "validate configuration, write nothing");
  app.add_flag("--allow-out-of-range", args.allow_out_of_range,
               "permit config values outside the standard ranges");

  using Handler = int (*)(const dlo::cli::GlobalArgs&);
  struct Sub {
    const char* name;
    const char* help;
    Handler handler;
  };
  const Sub subs[] = {
      {"gen-flex-data", "simulate the material sweep and write the flexibility dataset",
       dlo::cli::cmd_gen_flex_data},
      {"train-flex", "train the flexibility estimators and write the shape-match report",
       dlo::cli::cmd_train_flex},
      {"eval-flex", "re-evaluate saved estimators on the dataset", dlo::cli::cmd_eval_flex},
      {"train-policy", "train insertion policies per regime / f setting / seed",
       dlo::cli::cmd_train_policy},
      {"eval-policy", "evaluate policies and baselines, write metrics tables",
       dlo::cli::cmd_eval_policy},
      {"oracle-smoke", "run the scripted straight-through insertion check",
       dlo::cli::cmd_oracle_smoke},
  };
  Handler selected = nullptr;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->callback([&selected, &s]() { selected = s.handler; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    args.cfg = dlo::cli::profile_config(profile);
    if (!config_path.empty()) args.cfg = dlo::cli::load_config(config_path, args.cfg);
    if (!out_dir.empty()) args.cfg.out_dir = out_dir;
    if (seed_set) args.cfg.seed = seed;
    args.cfg.validate(args.allow_out_of_range);
    return selected(args);
  } catch (const dlo::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
