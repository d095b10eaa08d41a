#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dlo/sim/step.hpp"
#include "dlo/sim/trajectory.hpp"

namespace dlo::env {

/// What the agent sees at the start of an episode. plane_normal fixes the
/// insertion plane the ring angle is expressed in.
struct Observation {
  std::vector<Vec3> rope;
  Vec3 ring_center = Vec3::Zero();
  double ring_angle = 0.0;
  double ring_radius = 0.0;
  Vec3 plane_normal = Vec3(0, 1, 0);
  std::optional<double> flexibility;
};

/// Action rectangles in ring-local coordinates (a = along the ring axis,
/// positive on the entry side; b = lateral in-plane). The start rectangle
/// floats off the entry face, the end rectangle off the exit face, so a
/// straight start-to-end motion carries the grip through the bore.
struct ActionBounds {
  double start_a_lo = 0, start_a_hi = 0;
  double start_b_lo = -0.05, start_b_hi = 0.05;
  double end_a_lo = 0, end_a_hi = 0;
  double end_b_lo = -0.05, end_b_hi = 0.05;
  double rot_lo = -1.5707963267948966;
  double rot_hi = 1.5707963267948966;

  static ActionBounds for_ring(const sim::RingConfig& ring);
};

/// The 7-D motion primitive parameters: grasp particle (as a fraction of the
/// chain), start and end grip poses. Construct via clamped()/from_normalized()
/// so components always sit inside their rectangles.
struct PrimitiveAction {
  double grasp_frac = 0.0;  ///< [0, 1], maps to particle round(frac * (n-1))
  Vec2 start_pos = Vec2::Zero();  ///< ring-local (a, b)
  Vec2 end_pos = Vec2::Zero();
  double start_rot = 0.0;  ///< rad about the plane normal
  double end_rot = 0.0;

  static PrimitiveAction clamped(double grasp_frac, const Vec2& start_pos, const Vec2& end_pos,
                                 double start_rot, double end_rot, const ActionBounds& bounds);
  /// u in [-1, 1]^7, mapped affinely into the rectangles.
  static PrimitiveAction from_normalized(const Eigen::VectorXd& u, const ActionBounds& bounds);
  Eigen::VectorXd to_normalized(const ActionBounds& bounds) const;
  Eigen::VectorXd to_vector() const;  ///< raw 7 components, for logging

  int grasp_index(int n) const;
};

/// Gripper tracking and phase timing constants.
struct ControlParams {
  double kp = 400.0;  ///< s^-2, critically damped with kd = 2 sqrt(kp)
  double kd = 40.0;   ///< s^-1
  double max_speed = 0.5;      ///< m/s
  double max_ang_speed = 2.0;  ///< rad/s
  int approach_steps = 120;    ///< attach pose -> start pose
  int insert_steps = 150;      ///< start pose -> end pose
  int settle_steps = 200;      ///< hold at end pose
  int reset_settle_steps = 100;  ///< rope relaxing onto the floor at reset
};

struct EnvConfig {
  int n = 40;
  double rest_len = 0.012;
  double ring_square_half = 0.05;  ///< ring center offset box (in-plane)
  double radius_lo = 0.01;
  double radius_hi = 0.025;
  double angle_lo = 0.0;
  double angle_hi = 2.356194490192344928846982537459627163;  // 3pi/4
  bool fixed_theta = false;           ///< theta = pi/2 exactly
  double rope_offset_half = 0.05;     ///< initial rope placement range
  double sweep_lo = 0.05;
  double sweep_hi = 1.0;
  int sweep_levels = 200;             ///< material sampled from this grid
  bool provide_f = true;
  Vec3 plane_normal = Vec3(0, 1, 0);
  Vec3 ring_base_center = Vec3(0, 0, 0.25);
  double ring_depth = 0.04;
  double ring_outer_radius = 0.04;
  ControlParams control;

  void validate() const;
};

/// Full hidden episode state produced by reset().
struct Scene {
  sim::RopeState rope;
  sim::RopeParams rope_params;
  sim::RingConfig ring;
  sim::World world;
  double sweep_param = 0.0;
  double flexibility = 0.0;  ///< ground-truth label, always computed
  ControlParams control;
  std::uint64_t seed = 0;
};

/// Latched stage flags, reward terms and final distances of one episode.
struct EpisodeOutcome {
  bool rope_in = false;
  bool rope_out = false;
  double d_floor = 0.0;
  double d_ceil = 0.0;
  double r_pen = 0.0;
  double reward = 0.0;
  bool success = false;
  double signed_endpoint_distance = 0.0;
  double max_stretch = 1.0;
  bool diverged = false;
};

std::pair<Observation, Scene> reset(const EnvConfig& config, std::uint64_t seed);

/// Ground-truth flexibility for a sweep value, via the measurement rig.
/// Memoized per sweep value (the rig is deterministic).
double scene_flexibility(double sweep_param);

struct WaypointSchedule {
  struct Target {
    Vec3 pos;
    double rot;
    bool track_stages;  ///< stage latching active (insertion + settle phases)
  };
  int grasp_index = 0;
  int partner_index = 0;
  Vec3 attach_pos = Vec3::Zero();
  double attach_rot = 0.0;
  std::vector<Target> targets;  ///< one per control step
};

/// Expand the primitive into per-step grip pose targets: attach at the
/// grasped particle, move to the start pose, interpolate to the end pose,
/// then hold. The grip approach is kinematic (pins attach in place).
WaypointSchedule build_primitive(const PrimitiveAction& action, const Scene& scene);

/// Run the schedule through the simulator with PD tracking of the grip pose,
/// latch rope_in/rope_out as the designated tip crosses the ring faces inside
/// the bore, and score the episode. Divergence marks the episode failed with
/// the stretch penalty applied.
EpisodeOutcome execute_episode(Scene& scene, const PrimitiveAction& action,
                               sim::TrajectoryRecorder* recorder = nullptr);

/// Axial distances from the tip to the exit ("floor") and entry ("ceiling")
/// faces: d_floor = |s + depth/2|, d_ceil = clamp(depth/2 - s, 0, depth)
/// where s is the tip's axial coordinate.
std::pair<double, double> stage_distances(const Vec3& tip, const sim::RingConfig& ring);

/// Staged reward: 0.5 (rope_in + rope_out) + r_pen + r_dist with
/// r_dist = -10 d_floor before entry, 5 d_ceil inside, 10 d_floor after exit.
/// r_pen = -2 when the rope ever stretched beyond 120%.
double compute_reward(bool rope_in, bool rope_out, double d_floor, double d_ceil,
                      bool stretch_exceeded);

/// Smoke scenario: rigid rope, ring facing straight up, 2.5 cm bore.
EnvConfig oracle_smoke_config();
/// The scripted action for it: grasp near the head, point the grip straight
/// down, descend along the ring axis. Succeeds deterministically.
PrimitiveAction oracle_smoke_action(const Scene& scene);

}  // namespace dlo::env
