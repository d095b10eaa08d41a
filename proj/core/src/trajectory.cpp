#include "dlo/sim/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dlo::sim {

void TrajectoryRecorder::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trajectory file: " + path);
  out << "step,particle_index,x,y,z\n";
  char buf[128];
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    for (std::size_t i = 0; i < frames_[t].size(); ++i) {
      const Vec3& p = frames_[t][i];
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.9g,%.9g,%.9g\n", t, i, p.x(), p.y(), p.z());
      out << buf;
    }
  }
}

}  // namespace dlo::sim
