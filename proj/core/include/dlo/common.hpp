#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace dlo {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Bad inputs: invalid parameters, shape mismatches, broken config files.
/// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Non-finite state detected while integrating. Carries the step index at
/// which the blow-up was first observed.
class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Loss went non-finite during an optimization run.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, int epoch)
      : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

inline bool almost_unit(const Vec3& v, double tol = 1e-9) {
  return std::abs(v.norm() - 1.0) <= tol;
}

}  // namespace dlo
