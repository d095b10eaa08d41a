#include "dlo/env/insertion.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "dlo/flex/dataset.hpp"
#include "dlo/rng.hpp"

namespace dlo::env {

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Grip direction for rotation angle phi about the plane normal, measured
// from the horizontal in-plane tangent.
Vec3 grip_dir(double phi, const Vec3& plane_normal) {
  const Vec3 t(-plane_normal.y(), plane_normal.x(), 0.0);
  return Eigen::AngleAxisd(phi, plane_normal) * t;
}

}  // namespace

ActionBounds ActionBounds::for_ring(const sim::RingConfig& ring) {
  ActionBounds b;
  const double half = ring.depth / 2.0;
  b.start_a_lo = half + 0.03;
  b.start_a_hi = half + 0.13;
  b.end_a_lo = -(half + 0.13);
  b.end_a_hi = -(half + 0.03);
  return b;
}

PrimitiveAction PrimitiveAction::clamped(double grasp_frac, const Vec2& start_pos,
                                         const Vec2& end_pos, double start_rot, double end_rot,
                                         const ActionBounds& b) {
  PrimitiveAction a;
  a.grasp_frac = clampd(grasp_frac, 0.0, 1.0);
  a.start_pos = Vec2(clampd(start_pos.x(), b.start_a_lo, b.start_a_hi),
                     clampd(start_pos.y(), b.start_b_lo, b.start_b_hi));
  a.end_pos = Vec2(clampd(end_pos.x(), b.end_a_lo, b.end_a_hi),
                   clampd(end_pos.y(), b.end_b_lo, b.end_b_hi));
  a.start_rot = clampd(start_rot, b.rot_lo, b.rot_hi);
  a.end_rot = clampd(end_rot, b.rot_lo, b.rot_hi);
  return a;
}

namespace {
double denorm(double u, double lo, double hi) {
  return lo + (clampd(u, -1.0, 1.0) + 1.0) * 0.5 * (hi - lo);
}
double norm(double v, double lo, double hi) {
  return hi == lo ? 0.0 : clampd(2.0 * (v - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}
}  // namespace

PrimitiveAction PrimitiveAction::from_normalized(const Eigen::VectorXd& u,
                                                 const ActionBounds& b) {
  if (u.size() != 7) throw ValidationError("PrimitiveAction: expected 7 action values");
  return clamped(denorm(u[0], 0.0, 1.0),
                 Vec2(denorm(u[1], b.start_a_lo, b.start_a_hi),
                      denorm(u[2], b.start_b_lo, b.start_b_hi)),
                 Vec2(denorm(u[3], b.end_a_lo, b.end_a_hi),
                      denorm(u[4], b.end_b_lo, b.end_b_hi)),
                 denorm(u[5], b.rot_lo, b.rot_hi), denorm(u[6], b.rot_lo, b.rot_hi), b);
}

Eigen::VectorXd PrimitiveAction::to_normalized(const ActionBounds& b) const {
  Eigen::VectorXd u(7);
  u << norm(grasp_frac, 0.0, 1.0), norm(start_pos.x(), b.start_a_lo, b.start_a_hi),
      norm(start_pos.y(), b.start_b_lo, b.start_b_hi), norm(end_pos.x(), b.end_a_lo, b.end_a_hi),
      norm(end_pos.y(), b.end_b_lo, b.end_b_hi), norm(start_rot, b.rot_lo, b.rot_hi),
      norm(end_rot, b.rot_lo, b.rot_hi);
  return u;
}

Eigen::VectorXd PrimitiveAction::to_vector() const {
  Eigen::VectorXd v(7);
  v << grasp_frac, start_pos.x(), start_pos.y(), end_pos.x(), end_pos.y(), start_rot, end_rot;
  return v;
}

int PrimitiveAction::grasp_index(int n) const {
  const int idx = static_cast<int>(std::lround(grasp_frac * (n - 1)));
  return std::clamp(idx, 0, n - 1);
}

void EnvConfig::validate() const {
  if (n < 4) throw ValidationError("EnvConfig: n must be >= 4");
  if (!(rest_len > 0)) throw ValidationError("EnvConfig: rest_len must be > 0");
  if (ring_square_half < 0 || ring_square_half > 0.05 + 1e-12)
    throw ValidationError("EnvConfig: ring square exceeds the 10 cm randomization box");
  if (rope_offset_half < 0 || rope_offset_half > 0.05 + 1e-12)
    throw ValidationError("EnvConfig: rope offset exceeds the 10 cm randomization box");
  if (!(radius_lo >= 0.01 - 1e-12 && radius_hi <= 0.025 + 1e-12 && radius_lo <= radius_hi))
    throw ValidationError("EnvConfig: ring radius range must sit inside [1 cm, 2.5 cm]");
  if (!(angle_lo >= 0.0 && angle_hi <= 2.356194490192344928846982537459627163 + 1e-12 &&
        angle_lo <= angle_hi))
    throw ValidationError("EnvConfig: angle range must sit inside [0, 3pi/4]");
  if (!(sweep_lo >= 0.0 && sweep_hi <= 1.0 && sweep_lo <= sweep_hi))
    throw ValidationError("EnvConfig: sweep range must sit inside [0, 1]");
  if (sweep_levels < 1) throw ValidationError("EnvConfig: sweep_levels must be >= 1");
  if (!almost_unit(plane_normal) || std::abs(plane_normal.z()) > 1e-9)
    throw ValidationError("EnvConfig: plane_normal must be a horizontal unit vector");
}

double scene_flexibility(double sweep_param) {
  static std::mutex mu;
  static std::map<double, double> cache;
  {
    std::scoped_lock lock(mu);
    auto it = cache.find(sweep_param);
    if (it != cache.end()) return it->second;
  }
  const double f = flex::label_flexibility(sweep_param);
  std::scoped_lock lock(mu);
  cache.emplace(sweep_param, f);
  return f;
}

std::pair<Observation, Scene> reset(const EnvConfig& config, std::uint64_t seed) {
  config.validate();

  Scene scene;
  scene.seed = seed;
  scene.control = config.control;

  Rng ring_rng = Rng::stream(seed, "env/ring");
  Rng rope_rng = Rng::stream(seed, "env/rope");

  const Vec3 tangent(-config.plane_normal.y(), config.plane_normal.x(), 0.0);

  scene.ring.plane_normal = config.plane_normal;
  scene.ring.center = config.ring_base_center +
                      tangent * ring_rng.uniform(-config.ring_square_half, config.ring_square_half) +
                      Vec3(0, 0, 1) * ring_rng.uniform(-config.ring_square_half, config.ring_square_half);
  scene.ring.inner_radius = ring_rng.uniform(config.radius_lo, config.radius_hi);
  scene.ring.depth = config.ring_depth;
  scene.ring.outer_radius = config.ring_outer_radius;
  scene.ring.angle = config.fixed_theta ? kPi / 2.0
                                        : ring_rng.uniform(config.angle_lo, config.angle_hi);
  scene.ring.validate();

  // Material: one level of the sweep grid.
  const int level = config.sweep_levels == 1 ? 0 : rope_rng.uniform_int(0, config.sweep_levels - 1);
  scene.sweep_param =
      config.sweep_levels == 1
          ? config.sweep_lo
          : config.sweep_lo + (config.sweep_hi - config.sweep_lo) * level / (config.sweep_levels - 1.0);
  scene.rope_params = sim::flex_sweep_to_params(scene.sweep_param, config.n);
  scene.rope_params.rest_len = config.rest_len;

  // Rope laid flat along the plane tangent, then relaxed onto the floor.
  scene.world.floor = true;
  scene.world.ring = scene.ring;
  const double rope_len = config.rest_len * (config.n - 1);
  const double offset = rope_rng.uniform(-config.rope_offset_half, config.rope_offset_half);
  const Vec3 base = tangent * (offset - rope_len / 2.0) + Vec3(0, 0, scene.world.contact_margin);
  scene.rope = sim::init_rope(scene.rope_params, base, tangent);
  for (int k = 0; k < config.control.reset_settle_steps; ++k)
    scene.rope = sim::step(scene.rope, scene.rope_params, scene.world);

  scene.flexibility = scene_flexibility(scene.sweep_param);

  Observation obs;
  obs.rope = scene.rope.positions;
  obs.ring_center = scene.ring.center;
  obs.ring_angle = scene.ring.angle;
  obs.ring_radius = scene.ring.inner_radius;
  obs.plane_normal = config.plane_normal;
  if (config.provide_f) obs.flexibility = scene.flexibility;
  return {obs, scene};
}

WaypointSchedule build_primitive(const PrimitiveAction& action, const Scene& scene) {
  const int n = scene.rope.size();
  WaypointSchedule ws;
  ws.grasp_index = action.grasp_index(n);
  ws.partner_index = ws.grasp_index < n - 1 ? ws.grasp_index + 1 : ws.grasp_index - 1;
  ws.attach_pos = scene.rope.positions[ws.grasp_index];

  const Vec3 tangent_dir =
      (scene.rope.positions[ws.partner_index] - scene.rope.positions[ws.grasp_index]).normalized();
  // In-plane angle of the current tangent, so attaching does not yank.
  const Vec3 t(-scene.ring.plane_normal.y(), scene.ring.plane_normal.x(), 0.0);
  ws.attach_rot = std::atan2(tangent_dir.dot(Vec3(0, 0, 1)), tangent_dir.dot(t));

  const Vec3 axis = scene.ring.axis();
  const Vec3 lateral = scene.ring.lateral();
  const Vec3 start_world =
      scene.ring.center + axis * action.start_pos.x() + lateral * action.start_pos.y();
  const Vec3 end_world =
      scene.ring.center + axis * action.end_pos.x() + lateral * action.end_pos.y();

  const ControlParams& cp = scene.control;
  ws.targets.reserve(cp.approach_steps + cp.insert_steps + cp.settle_steps);
  for (int k = 1; k <= cp.approach_steps; ++k) {
    const double t01 = static_cast<double>(k) / cp.approach_steps;
    ws.targets.push_back({ws.attach_pos + (start_world - ws.attach_pos) * t01,
                          ws.attach_rot + (action.start_rot - ws.attach_rot) * t01, false});
  }
  for (int k = 1; k <= cp.insert_steps; ++k) {
    const double t01 = static_cast<double>(k) / cp.insert_steps;
    ws.targets.push_back({start_world + (end_world - start_world) * t01,
                          action.start_rot + (action.end_rot - action.start_rot) * t01, true});
  }
  for (int k = 0; k < cp.settle_steps; ++k)
    ws.targets.push_back({end_world, action.end_rot, true});
  return ws;
}

std::pair<double, double> stage_distances(const Vec3& tip, const sim::RingConfig& ring) {
  const double s = ring.axial(tip);
  const double half = ring.depth / 2.0;
  const double d_floor = std::abs(s + half);
  const double d_ceil = clampd(half - s, 0.0, ring.depth);
  return {d_floor, d_ceil};
}

double compute_reward(bool rope_in, bool rope_out, double d_floor, double d_ceil,
                      bool stretch_exceeded) {
  if (d_floor < 0 || d_ceil < 0) throw ValidationError("compute_reward: distances must be >= 0");
  const double r_pen = stretch_exceeded ? -2.0 : 0.0;
  double r_dist = 0.0;
  if (!rope_in)
    r_dist = -10.0 * d_floor;
  else if (!rope_out)
    r_dist = 5.0 * d_ceil;
  else
    r_dist = 10.0 * d_floor;
  return 0.5 * (static_cast<double>(rope_in) + static_cast<double>(rope_out)) + r_pen + r_dist;
}

EnvConfig oracle_smoke_config() {
  EnvConfig cfg;
  cfg.angle_lo = cfg.angle_hi = 0.0;
  cfg.radius_lo = cfg.radius_hi = 0.025;
  cfg.sweep_lo = cfg.sweep_hi = 1.0;
  cfg.sweep_levels = 1;
  cfg.ring_square_half = 0.0;
  cfg.rope_offset_half = 0.0;
  cfg.provide_f = false;
  return cfg;
}

PrimitiveAction oracle_smoke_action(const Scene& scene) {
  const ActionBounds b = ActionBounds::for_ring(scene.ring);
  const int n = scene.rope.size();
  const double frac = static_cast<double>(n - 4) / (n - 1);
  return PrimitiveAction::clamped(frac, Vec2(0.5 * (b.start_a_lo + b.start_a_hi), 0.0),
                                  Vec2(0.5 * (b.end_a_lo + b.end_a_hi), 0.0), -kPi / 2.0,
                                  -kPi / 2.0, b);
}

EpisodeOutcome execute_episode(Scene& scene, const PrimitiveAction& action,
                               sim::TrajectoryRecorder* recorder) {
  const WaypointSchedule ws = build_primitive(action, scene);
  const int n = scene.rope.size();
  const int tip = n - 1;
  const double half = scene.ring.depth / 2.0;

  scene.rope.grasped_index = ws.grasp_index;
  scene.rope.grasp_target = ws.attach_pos;
  scene.rope.aux_pins.clear();
  scene.rope.aux_pins.push_back(
      {ws.partner_index,
       ws.attach_pos + grip_dir(ws.attach_rot, scene.ring.plane_normal) * scene.rope_params.rest_len});

  Vec3 grip_pos = ws.attach_pos;
  Vec3 grip_vel = Vec3::Zero();
  double grip_rot = ws.attach_rot;
  double grip_ang_vel = 0.0;

  EpisodeOutcome out;
  bool stretch_exceeded = false;
  double prev_axial = scene.ring.axial(scene.rope.positions[tip]);
  Vec3 last_tip = scene.rope.positions[tip];

  const ControlParams& cp = scene.control;
  const double dt = scene.rope_params.dt;

  for (const WaypointSchedule::Target& target : ws.targets) {
    // Critically damped tracking of the grip pose, with speed caps.
    const Vec3 acc = cp.kp * (target.pos - grip_pos) - cp.kd * grip_vel;
    grip_vel += acc * dt;
    if (grip_vel.norm() > cp.max_speed) grip_vel *= cp.max_speed / grip_vel.norm();
    grip_pos += grip_vel * dt;

    const double ang_acc = cp.kp * (target.rot - grip_rot) - cp.kd * grip_ang_vel;
    grip_ang_vel += ang_acc * dt;
    grip_ang_vel = clampd(grip_ang_vel, -cp.max_ang_speed, cp.max_ang_speed);
    grip_rot += grip_ang_vel * dt;

    scene.rope.grasp_target = grip_pos;
    scene.rope.aux_pins[0].second =
        grip_pos + grip_dir(grip_rot, scene.ring.plane_normal) * scene.rope_params.rest_len;

    try {
      scene.rope = sim::step(scene.rope, scene.rope_params, scene.world);
    } catch (const SimulationDiverged&) {
      out.diverged = true;
      out.rope_in = false;
      out.rope_out = false;
      const auto [df, dc] = stage_distances(last_tip, scene.ring);
      out.d_floor = df;
      out.d_ceil = dc;
      out.r_pen = -2.0;
      out.reward = compute_reward(false, false, df, dc, true);
      out.success = false;
      out.signed_endpoint_distance = -df;
      return out;
    }
    if (recorder) recorder->record(scene.rope);
    last_tip = scene.rope.positions[tip];

    const double stretch = sim::max_stretch_ratio(scene.rope, scene.rope_params);
    out.max_stretch = std::max(out.max_stretch, stretch);
    if (stretch > 1.2) stretch_exceeded = true;

    const double axial = scene.ring.axial(last_tip);
    if (target.track_stages) {
      const double radial = scene.ring.radial(last_tip);
      if (!out.rope_in && prev_axial > half && axial <= half && radial < scene.ring.inner_radius)
        out.rope_in = true;
      if (out.rope_in && !out.rope_out && prev_axial > -half && axial <= -half &&
          radial < scene.ring.inner_radius)
        out.rope_out = true;
    }
    prev_axial = axial;
  }

  const auto [d_floor, d_ceil] = stage_distances(last_tip, scene.ring);
  out.d_floor = d_floor;
  out.d_ceil = d_ceil;
  out.r_pen = stretch_exceeded ? -2.0 : 0.0;
  out.reward = compute_reward(out.rope_in, out.rope_out, d_floor, d_ceil, stretch_exceeded);
  out.success = out.rope_out;
  out.signed_endpoint_distance = out.rope_out ? d_floor : -d_floor;
  return out;
}

}  // namespace dlo::env
