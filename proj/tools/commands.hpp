#pragma once

#include <string>

#include "config.hpp"

namespace dlo::cli {

struct GlobalArgs {
  ExperimentConfig cfg;
  bool dry_run = false;
  bool allow_out_of_range = false;
};

int cmd_gen_flex_data(const GlobalArgs& args);
int cmd_train_flex(const GlobalArgs& args);
int cmd_eval_flex(const GlobalArgs& args);
int cmd_train_policy(const GlobalArgs& args);
int cmd_eval_policy(const GlobalArgs& args);
int cmd_oracle_smoke(const GlobalArgs& args);

}  // namespace dlo::cli
