#pragma once

#include <string>
#include <vector>

#include "dlo/sim/rope.hpp"

namespace dlo::sim {

/// Collects per-step particle positions and writes them as CSV with columns
/// (step, particle_index, x, y, z). One file per episode.
class TrajectoryRecorder {
 public:
  void record(const RopeState& state) { frames_.push_back(state.positions); }
  std::size_t frame_count() const { return frames_.size(); }
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::vector<Vec3>> frames_;
};

}  // namespace dlo::sim
