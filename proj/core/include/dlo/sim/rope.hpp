#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dlo/common.hpp"

namespace dlo::sim {

/// Material and integration parameters for a particle-chain rope.
/// The three stiffness knobs (bend_stiffness, extra_spring_stiffness,
/// solver_iters) together span the soft-to-rigid range used for dataset
/// sweeps; see flex_sweep_to_params().
struct RopeParams {
  int n = 40;                          ///< particle count, >= 4
  double rest_len = 0.012;             ///< segment rest length (m)
  double particle_mass = 0.02;         ///< (kg), uniform
  double bend_stiffness = 0.5;         ///< [0, 1], second-neighbor bending constraint
  int solver_iters = 10;               ///< >= 1 projection rounds per step
  double extra_spring_stiffness = 0.5; ///< [0, 1], second-neighbor reinforcement springs
  double damping = 0.02;               ///< [0, 1), velocity damping per step
  double dt = 0.005;                   ///< timestep (s)

  void validate() const;
};

/// Particle state plus the kinematic grasp. `grasped_index`/`grasp_target`
/// is the gripper-held particle; `aux_pins` are additional hard position
/// constraints used to fix the grip orientation (a parallel-jaw grip spans
/// two particles, which is also what keeps the local tangent defined for
/// fully floppy ropes).
struct RopeState {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  std::optional<int> grasped_index;
  std::optional<Vec3> grasp_target;
  std::vector<std::pair<int, Vec3>> aux_pins;

  int size() const { return static_cast<int>(positions.size()); }
  bool finite() const;
};

/// Straight chain of params.n particles spaced rest_len apart from `base`
/// along unit `direction`, at rest, ungrasped.
RopeState init_rope(const RopeParams& params, const Vec3& base, const Vec3& direction);

/// Max over adjacent segments of current length / rest length.
double max_stretch_ratio(const RopeState& state, const RopeParams& params);

/// One-dimensional material sweep: a single scalar s in [0, 1] drives all
/// three stiffness knobs (bend = s, second-neighbor springs = s,
/// solver_iters = round(2 + 18 s)). s = 0 is the floppiest rope, s = 1 the
/// most rigid.
RopeParams flex_sweep_to_params(double s, int n = 40);

}  // namespace dlo::sim
