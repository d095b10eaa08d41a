#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace dlo::env {

/// One JSON line per episode; the schema downstream tooling reads back.
struct EpisodeRecord {
  std::uint64_t seed = 0;
  double sweep_param = 0.0;
  double f = 0.0;
  double theta = 0.0;
  double radius = 0.0;
  Eigen::VectorXd action;  ///< 7 raw primitive components
  bool rope_in = false;
  bool rope_out = false;
  double reward = 0.0;
  double signed_endpoint_distance = 0.0;
  bool success = false;
};

class EpisodeLogWriter {
 public:
  explicit EpisodeLogWriter(const std::string& path);
  void write(const EpisodeRecord& rec);

 private:
  std::ofstream out_;
};

std::vector<EpisodeRecord> read_episode_log(const std::string& path);

}  // namespace dlo::env
