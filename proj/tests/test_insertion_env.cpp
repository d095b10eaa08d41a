#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "dlo/env/insertion.hpp"
#include "dlo/rng.hpp"

using namespace dlo;
using namespace dlo::env;

namespace {

constexpr double kPi = 3.141592653589793238462643383279503;

EnvConfig oracle_config() { return oracle_smoke_config(); }
PrimitiveAction oracle_action(const Scene& scene) { return oracle_smoke_action(scene); }

}  // namespace

TEST_SUITE("insertion_env") {

TEST_CASE("reset: fixed theta pins the ring angle to pi/2") {
  EnvConfig cfg;
  cfg.fixed_theta = true;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto [obs, scene] = reset(cfg, seed);
    CHECK(obs.ring_angle == kPi / 2.0);
  }
}

TEST_CASE("reset is deterministic and respects provide_f") {
  EnvConfig cfg;
  auto [obs_a, scene_a] = reset(cfg, 42);
  auto [obs_b, scene_b] = reset(cfg, 42);
  CHECK(obs_a.ring_center == obs_b.ring_center);
  CHECK(obs_a.ring_radius == obs_b.ring_radius);
  CHECK(obs_a.ring_angle == obs_b.ring_angle);
  REQUIRE(obs_a.rope.size() == obs_b.rope.size());
  for (std::size_t i = 0; i < obs_a.rope.size(); ++i) CHECK(obs_a.rope[i] == obs_b.rope[i]);
  REQUIRE(obs_a.flexibility.has_value());
  CHECK(*obs_a.flexibility == *obs_b.flexibility);

  cfg.provide_f = false;
  auto [obs_c, scene_c] = reset(cfg, 42);
  CHECK_FALSE(obs_c.flexibility.has_value());
  // hidden scene state still knows the label
  CHECK(scene_c.flexibility == scene_a.flexibility);
}

TEST_CASE("reset validates ranges") {
  EnvConfig cfg;
  cfg.radius_hi = 0.05;  // outside the allowed randomization
  CHECK_THROWS_AS(reset(cfg, 1), ValidationError);
  EnvConfig cfg2;
  cfg2.angle_hi = 3.0;
  CHECK_THROWS_AS(reset(cfg2, 1), ValidationError);
}

TEST_CASE("stage distances from the tip's axial coordinate") {
  sim::RingConfig ring;
  ring.center = Vec3(0, 0, 0.3);
  ring.inner_radius = 0.01;
  ring.outer_radius = 0.04;
  ring.depth = 0.04;
  ring.angle = 0.0;  // axis +z

  auto [df_center, dc_center] = stage_distances(ring.center, ring);
  CHECK(df_center == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(dc_center == doctest::Approx(0.02).epsilon(1e-12));

  const Vec3 on_entry = ring.center + Vec3(0, 0, 0.02);
  auto [df_entry, dc_entry] = stage_distances(on_entry, ring);
  CHECK(dc_entry == doctest::Approx(0.0).epsilon(1e-12));

  const Vec3 past_exit = ring.center - Vec3(0, 0, 0.05);
  auto [df_exit, dc_exit] = stage_distances(past_exit, ring);
  CHECK(df_exit == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("reward branch table") {
  CHECK(compute_reward(false, false, 0.10, 0.0, false) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(compute_reward(true, false, 0.0, 0.02, false) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(compute_reward(true, true, 0.05, 0.04, true) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(compute_reward(false, false, -0.1, 0.0, false), ValidationError);
}

TEST_CASE("grasp fraction maps to particle indices") {
  PrimitiveAction a;
  a.grasp_frac = 0.0;
  CHECK(a.grasp_index(40) == 0);
  a.grasp_frac = 1.0;
  CHECK(a.grasp_index(40) == 39);
  a.grasp_frac = 0.5;
  CHECK(a.grasp_index(41) == 20);
}

TEST_CASE("actions clamp into their rectangles") {
  sim::RingConfig ring;
  ring.depth = 0.04;
  const ActionBounds b = ActionBounds::for_ring(ring);
  const PrimitiveAction a = PrimitiveAction::clamped(
      1.7, Vec2(10.0, -10.0), Vec2(-10.0, 10.0), -3.0, 3.0, b);
  CHECK(a.grasp_frac == 1.0);
  CHECK(a.start_pos.x() == b.start_a_hi);
  CHECK(a.start_pos.y() == b.start_b_lo);
  CHECK(a.end_pos.x() == b.end_a_lo);
  CHECK(a.end_pos.y() == b.end_b_hi);
  CHECK(a.start_rot == b.rot_lo);
  CHECK(a.end_rot == b.rot_hi);

  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd u(7);
    for (int i = 0; i < 7; ++i) u[i] = rng.uniform(-2.0, 2.0);
    const PrimitiveAction c = PrimitiveAction::from_normalized(u, b);
    CHECK(c.start_pos.x() >= b.start_a_lo);
    CHECK(c.start_pos.x() <= b.start_a_hi);
    CHECK(c.end_pos.x() >= b.end_a_lo);
    CHECK(c.end_pos.x() <= b.end_a_hi);
    CHECK(c.start_rot >= b.rot_lo);
    CHECK(c.end_rot <= b.rot_hi);
  }
}

TEST_CASE("build_primitive: degenerate interpolations hold pose") {
  EnvConfig cfg = oracle_config();
  auto [obs, scene] = reset(cfg, 5);
  const ActionBounds b = ActionBounds::for_ring(scene.ring);
  const Vec2 pose(0.5 * (b.start_a_lo + b.start_a_hi), 0.01);
  PrimitiveAction a = PrimitiveAction::clamped(0.5, pose, pose, 0.3, 0.3, b);
  a.end_pos = a.start_pos;  // same rectangle coordinates, distinct rectangles otherwise
  const WaypointSchedule ws = build_primitive(a, scene);

  // during the insertion + settle phases the target must stay at start pose
  const auto& first_insert = ws.targets[scene.control.approach_steps];
  const auto& last = ws.targets.back();
  CHECK((first_insert.pos - last.pos).norm() < 1e-12);
  CHECK(first_insert.rot == doctest::Approx(last.rot).epsilon(1e-12));
}

TEST_CASE("scripted straight-through push succeeds deterministically") {
  EnvConfig cfg = oracle_config();
  auto [obs, scene] = reset(cfg, 2024);
  const PrimitiveAction action = oracle_action(scene);
  EpisodeOutcome out = execute_episode(scene, action);
  CHECK(out.rope_in);
  CHECK(out.rope_out);
  CHECK(out.success);
  CHECK(out.signed_endpoint_distance > 0.0);

  auto [obs2, scene2] = reset(cfg, 2024);
  EpisodeOutcome out2 = execute_episode(scene2, action);
  CHECK(out2.success == out.success);
  CHECK(out2.reward == out.reward);
  CHECK(out2.signed_endpoint_distance == out.signed_endpoint_distance);
  CHECK(out2.d_floor == out.d_floor);
}

TEST_CASE("missed insertion lands in the first reward branch") {
  EnvConfig cfg = oracle_config();
  auto [obs, scene] = reset(cfg, 77);
  const ActionBounds b = ActionBounds::for_ring(scene.ring);
  // end pose stays far above the ring: rope never enters
  const PrimitiveAction miss = PrimitiveAction::clamped(
      0.2, Vec2(b.start_a_hi, b.start_b_hi), Vec2(b.end_a_hi, b.end_b_hi), 0.0, 0.0, b);
  // end rectangle is below the ring; use start-side end pose instead
  PrimitiveAction hover = miss;
  hover.end_pos = Vec2(b.end_a_hi, b.end_b_hi);
  EpisodeOutcome out = execute_episode(scene, hover);
  if (!out.rope_in) {
    CHECK(out.reward ==
          doctest::Approx(0.5 * 0 + out.r_pen + -10.0 * out.d_floor).epsilon(1e-12));
    CHECK(out.signed_endpoint_distance == doctest::Approx(-out.d_floor).epsilon(1e-12));
  }
  CHECK((out.rope_out ? out.rope_in : true));  // rope_out implies rope_in
}

TEST_CASE("outcome reward always matches its own fields") {
  Rng rng(31);
  EnvConfig cfg;
  for (int trial = 0; trial < 4; ++trial) {
    auto [obs, scene] = reset(cfg, 9000 + trial);
    const ActionBounds b = ActionBounds::for_ring(scene.ring);
    Eigen::VectorXd u(7);
    for (int i = 0; i < 7; ++i) u[i] = rng.uniform(-1, 1);
    EpisodeOutcome out = execute_episode(scene, PrimitiveAction::from_normalized(u, b));
    CHECK(out.reward == doctest::Approx(compute_reward(out.rope_in, out.rope_out, out.d_floor,
                                                       out.d_ceil, out.r_pen < 0.0))
                            .epsilon(1e-12));
    CHECK(out.success == out.rope_out);
    if (out.rope_out) CHECK(out.rope_in);
  }
}

TEST_CASE("episodes are invariant to rotating the whole scene about z") {
  EnvConfig cfg = oracle_config();
  auto [obs_a, scene_a] = reset(cfg, 31415);
  const PrimitiveAction action = oracle_action(scene_a);
  EpisodeOutcome out_a = execute_episode(scene_a, action);

  EnvConfig rotated = cfg;
  const double ang = 0.5235987755982988;  // 30 degrees
  rotated.plane_normal = Eigen::AngleAxisd(ang, Vec3(0, 0, 1)) * Vec3(0, 1, 0);
  rotated.ring_base_center = Eigen::AngleAxisd(ang, Vec3(0, 0, 1)) * cfg.ring_base_center;
  auto [obs_b, scene_b] = reset(rotated, 31415);
  EpisodeOutcome out_b = execute_episode(scene_b, action);

  CHECK(out_a.rope_in == out_b.rope_in);
  CHECK(out_a.rope_out == out_b.rope_out);
  CHECK(out_a.d_floor == doctest::Approx(out_b.d_floor).epsilon(1e-6));
  CHECK(out_a.reward == doctest::Approx(out_b.reward).epsilon(1e-6));
}

TEST_CASE("divergent episode fails with penalty applied") {
  EnvConfig cfg = oracle_config();
  auto [obs, scene] = reset(cfg, 3);
  scene.rope.positions[5].x() = std::numeric_limits<double>::quiet_NaN();
  EpisodeOutcome out = execute_episode(scene, oracle_action(scene));
  CHECK(out.diverged);
  CHECK_FALSE(out.rope_in);
  CHECK_FALSE(out.success);
  CHECK(out.r_pen == -2.0);
}

}  // TEST_SUITE
