#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "config.hpp"

using namespace dlo;
using namespace dlo::cli;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
#ifdef DLO_CLI_PATH
  const std::string cmd = std::string(DLO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
#else
  (void)args;
  return -1;
#endif
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("profiles and config overrides") {
  const ExperimentConfig desk = profile_config("desk");
  CHECK(desk.sac.episodes == 8000);
  CHECK(desk.eval.radius == 0.025);
  const ExperimentConfig paper = profile_config("paper");
  CHECK(paper.sac.episodes == 40000);
  CHECK(paper.eval.radius == 0.01);
  CHECK_THROWS_AS(profile_config("galaxy"), ValidationError);

  write_file("cfg_ok.json", R"({"seed": 9, "sac": {"episodes": 100}})");
  const ExperimentConfig loaded = load_config("cfg_ok.json", desk);
  CHECK(loaded.seed == 9);
  CHECK(loaded.sac.episodes == 100);
  CHECK(loaded.sac.batch == desk.sac.batch);  // untouched defaults survive
  std::remove("cfg_ok.json");
}

TEST_CASE("unknown keys are rejected") {
  write_file("cfg_bad.json", R"({"seed": 1, "sacc": {}})");
  CHECK_THROWS_AS(load_config("cfg_bad.json", profile_config("desk")), ValidationError);
  std::remove("cfg_bad.json");

  write_file("cfg_bad2.json", R"({"sac": {"episodes": 10, "momentum": 0.9}})");
  CHECK_THROWS_AS(load_config("cfg_bad2.json", profile_config("desk")), ValidationError);
  std::remove("cfg_bad2.json");
}

TEST_CASE("range guard needs the explicit override") {
  ExperimentConfig cfg = profile_config("desk");
  cfg.eval.radius = 0.05;
  CHECK_THROWS_AS(cfg.validate(false), ValidationError);
  CHECK_NOTHROW(cfg.validate(true));

  ExperimentConfig cfg2 = profile_config("desk");
  cfg2.eval.f_mode = "psychic";
  CHECK_THROWS_AS(cfg2.validate(false), ValidationError);
  CHECK_THROWS_AS(cfg2.validate(true), ValidationError);  // not a range issue
}

TEST_CASE("config json round-trips") {
  ExperimentConfig cfg = profile_config("desk");
  cfg.seed = 123;
  cfg.flex_data.sweep_levels = 17;
  cfg.train_policy.seeds = {4, 5};
  write_file("cfg_rt.json", config_to_json(cfg));
  const ExperimentConfig back = load_config("cfg_rt.json", profile_config("desk"));
  CHECK(back.seed == 123);
  CHECK(back.flex_data.sweep_levels == 17);
  CHECK(back.train_policy.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(config_to_json(back) == config_to_json(cfg));
  std::remove("cfg_rt.json");
}

TEST_CASE("cli binary: dry-run writes nothing, reruns are byte-identical") {
  const std::string dir = "cli_test_out";
  fs::remove_all(dir);
  write_file("cli_small.json",
             R"({"flex_data": {"sweep_levels": 4, "per_sweep_augments": 2,
                               "val_augments": 1, "test_augments": 1}})");

  REQUIRE(run_cli("gen-flex-data --config cli_small.json --out " + dir + " --dry-run") == 0);
  CHECK_FALSE(fs::exists(dir + "/flex_dataset.jsonl"));

  REQUIRE(run_cli("gen-flex-data --config cli_small.json --out " + dir) == 0);
  REQUIRE(fs::exists(dir + "/flex_dataset.jsonl"));
  const std::string first = slurp(dir + "/flex_dataset.jsonl");
  REQUIRE(run_cli("gen-flex-data --config cli_small.json --out " + dir) == 0);
  CHECK(slurp(dir + "/flex_dataset.jsonl") == first);

  // validation failures exit with code 1
  write_file("cli_bad.json", R"({"eval": {"radius": 0.2}})");
  CHECK(run_cli("gen-flex-data --config cli_bad.json --out " + dir) == 1);
  CHECK(run_cli("gen-flex-data --config cli_bad.json --allow-out-of-range --out " + dir) == 0);

  CHECK(run_cli("oracle-smoke") == 0);

  fs::remove_all(dir);
  std::remove("cli_small.json");
  std::remove("cli_bad.json");
}

}  // TEST_SUITE
