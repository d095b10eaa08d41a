#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>

#include "dlo/rng.hpp"
#include "dlo/sim/step.hpp"
#include "dlo/sim/trajectory.hpp"
#include "support/oracles.hpp"

using namespace dlo;
using namespace dlo::sim;

namespace {

RopeState clamped_horizontal(const RopeParams& p, int grasp) {
  RopeState rope = init_rope(p, Vec3(grasp * p.rest_len, 0, 0), Vec3(-1, 0, 0));
  rope.grasped_index = grasp;
  rope.grasp_target = rope.positions[grasp];
  rope.aux_pins.push_back({grasp + 1, rope.positions[grasp + 1]});
  return rope;
}

}  // namespace

TEST_SUITE("pbd_sim") {

TEST_CASE("init_rope lays particles at rest spacing") {
  RopeParams p;
  p.n = 4;
  p.rest_len = 0.012;
  const RopeState s = init_rope(p, Vec3::Zero(), Vec3(1, 0, 0));
  CHECK(s.positions[0].isApprox(Vec3(0, 0, 0), 0));
  CHECK(s.positions[1].isApprox(Vec3(0.012, 0, 0), 1e-15));
  CHECK(s.positions[2].isApprox(Vec3(0.024, 0, 0), 1e-15));
  CHECK(s.positions[3].isApprox(Vec3(0.036, 0, 0), 1e-15));
  for (const Vec3& v : s.velocities) CHECK(v.norm() == 0.0);
  CHECK_FALSE(s.grasped_index.has_value());
}

TEST_CASE("init_rope along -z keeps segment lengths") {
  RopeParams p;
  p.n = 4;
  const RopeState s = init_rope(p, Vec3(1, 2, 3), Vec3(0, 0, -1));
  for (int i = 0; i + 1 < p.n; ++i)
    CHECK((s.positions[i + 1] - s.positions[i]).norm() == doctest::Approx(0.012).epsilon(1e-12));
}

TEST_CASE("init_rope total rest length") {
  RopeParams p;
  p.n = 40;
  const RopeState s = init_rope(p, Vec3::Zero(), Vec3(0, 1, 0));
  CHECK((s.positions[39] - s.positions[0]).norm() ==
        doctest::Approx(0.468).epsilon(1e-12));
}

TEST_CASE("init_rope validation") {
  RopeParams p;
  p.n = 3;  // chain too short for the flexibility window
  CHECK_THROWS_AS(init_rope(p, Vec3::Zero(), Vec3(1, 0, 0)), ValidationError);
  p.n = 10;
  CHECK_THROWS_AS(init_rope(p, Vec3::Zero(), Vec3(1, 1, 0)), ValidationError);
}

TEST_CASE("free fall velocity after one step") {
  RopeParams p;
  p.n = 4;
  p.damping = 0.0;
  p.dt = 0.01;
  RopeState s = init_rope(p, Vec3(0, 0, 10), Vec3(1, 0, 0));
  World w;
  w.floor = false;
  s = step(s, p, w);
  for (const Vec3& v : s.velocities) {
    CHECK(v.z() == doctest::Approx(-0.0981).epsilon(1e-12));
    CHECK(v.x() == 0.0);
  }
}

TEST_CASE("symmetric distance projection moves both ends equally") {
  Vec3 a(0, 0, 0), b(2 * 0.012, 0, 0);
  detail::project_pair(a, b, 1.0, 1.0, 0.012, 1.0);
  CHECK(a.x() == doctest::Approx(0.006).epsilon(1e-12));
  CHECK(b.x() == doctest::Approx(0.018).epsilon(1e-12));
}

TEST_CASE("straightness projection is exact at k=1 and momentum free") {
  Vec3 a(0, 0, 0), m(0.012, 0, -0.004), b(0.024, 0, 0);
  const Vec3 sum_before = a + m + b;
  detail::project_straightness(a, m, b, 1.0);
  CHECK((2.0 * m - a - b).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((a + m + b - sum_before).norm() < 1e-15);
}

TEST_CASE("grasped particle is exactly at its target after a step") {
  RopeParams p;
  p.n = 8;
  RopeState s = init_rope(p, Vec3(0, 0, 0.5), Vec3(1, 0, 0));
  s.grasped_index = 0;
  s.grasp_target = Vec3(0, 0, 0.5);
  World w;
  for (int k = 0; k < 50; ++k) {
    s = step(s, p, w);
    CHECK((s.positions[0] - Vec3(0, 0, 0.5)).norm() == 0.0);
  }
}

TEST_CASE("collide_ring leaves bore and far field untouched") {
  RingConfig ring;
  ring.center = Vec3(0, 0, 0.3);
  ring.inner_radius = 0.01;
  ring.outer_radius = 0.04;
  ring.depth = 0.04;
  ring.angle = 0.0;
  CHECK(collide_ring(ring.center, ring) == ring.center);
  const Vec3 far = ring.center + Vec3(0.5, 0, 0);
  CHECK(collide_ring(far, ring) == far);
}

TEST_CASE("collide_ring matches brute-force nearest surface") {
  RingConfig ring;
  ring.center = Vec3(0.02, -0.01, 0.25);
  ring.inner_radius = 0.012;
  ring.outer_radius = 0.04;
  ring.depth = 0.04;
  ring.angle = 0.7;
  const double margin = 0.001;

  Rng rng(42);
  int inside_checked = 0;
  while (inside_checked < 30) {
    const Vec3 probe = ring.center + Vec3(rng.uniform(-0.06, 0.06), rng.uniform(-0.06, 0.06),
                                          rng.uniform(-0.06, 0.06));
    const Vec3 out = collide_ring(probe, ring, margin);
    if (!dlo::testing::inside_ring_solid(probe, ring)) continue;
    ++inside_checked;
    const double brute = dlo::testing::ring_surface_distance(probe, ring);
    CHECK((out - probe).norm() == doctest::Approx(brute + margin).epsilon(0.02));
    CHECK_FALSE(dlo::testing::inside_ring_solid(out, ring, 1e-9));
  }

  // the spec's mid-wall example: radial midpoint, axial center
  const Vec3 mid = ring.center + ring.lateral() * (0.5 * (ring.inner_radius + ring.outer_radius));
  const Vec3 out = collide_ring(mid, ring, margin);
  const double brute = dlo::testing::ring_surface_distance(mid, ring);
  CHECK((out - mid).norm() == doctest::Approx(brute + margin).epsilon(0.02));
}

TEST_CASE("settle returns after one step with infinite tolerance") {
  RopeParams p;
  p.n = 6;
  RopeState s = init_rope(p, Vec3(0, 0, 0.5), Vec3(1, 0, 0));
  s.grasped_index = 0;
  s.grasp_target = Vec3(0, 0, 0.5);
  World w;
  const SettleResult res =
      settle_quasi_static(s, p, w, 2000, std::numeric_limits<double>::infinity());
  CHECK(res.steps == 1);
  CHECK(res.converged);
}

TEST_CASE("rigid horizontal chain settles with finite displacement") {
  RopeParams p = flex_sweep_to_params(1.0, 12);
  RopeState s = clamped_horizontal(p, 0);
  World w;
  w.floor = false;
  const SettleResult res = settle_quasi_static(s, p, w, 4000, 1e-3);
  CHECK(res.converged);
  double vmax = 0.0;
  for (const Vec3& v : res.state.velocities) vmax = std::max(vmax, v.norm());
  CHECK(vmax < 1e-3);
  CHECK(res.state.positions[11].z() > -0.14);  // did not free fall
}

TEST_CASE("settling is bitwise deterministic") {
  RopeParams p = flex_sweep_to_params(0.35, 16);
  World w;
  w.floor = false;
  const SettleResult a = settle_quasi_static(clamped_horizontal(p, 0), p, w, 1500, 1e-3);
  const SettleResult b = settle_quasi_static(clamped_horizontal(p, 0), p, w, 1500, 1e-3);
  REQUIRE(a.steps == b.steps);
  for (int i = 0; i < p.n; ++i) {
    CHECK(a.state.positions[i] == b.state.positions[i]);
    CHECK(a.state.velocities[i] == b.state.velocities[i]);
  }
}

TEST_CASE("max_stretch_ratio") {
  RopeParams p;
  p.n = 5;
  RopeState s = init_rope(p, Vec3::Zero(), Vec3(1, 0, 0));
  CHECK(max_stretch_ratio(s, p) == doctest::Approx(1.0).epsilon(1e-12));
  s.positions[1].x() = s.positions[0].x() + 0.0144;
  CHECK(max_stretch_ratio(s, p) == doctest::Approx(1.2).epsilon(1e-12));
  for (int i = 0; i < 5; ++i) s.positions[i] = Vec3(0.010 * i, 0, 0);
  CHECK(max_stretch_ratio(s, p) == doctest::Approx(0.010 / 0.012).epsilon(1e-12));
}

TEST_CASE("quiescent stretch residual stays under 5% for stiff half of sweep") {
  World w;
  w.floor = false;
  for (double s_val : {0.5, 0.625, 0.75, 0.875, 1.0}) {
    RopeParams p = flex_sweep_to_params(s_val, 20);
    const SettleResult res = settle_quasi_static(clamped_horizontal(p, 10), p, w, 2000, 1e-3);
    CHECK(res.converged);
    CHECK(max_stretch_ratio(res.state, p) < 1.05);
  }
}

TEST_CASE("tip droop is non-increasing in bend stiffness") {
  World w;
  w.floor = false;
  double prev = 1e9;
  for (int i = 0; i < 6; ++i) {
    RopeParams p;
    p.n = 15;
    p.bend_stiffness = i / 5.0;
    p.extra_spring_stiffness = 0.0;
    p.solver_iters = 30;
    const SettleResult res = settle_quasi_static(clamped_horizontal(p, 0), p, w, 6000, 1e-4);
    REQUIRE(res.converged);
    const double droop = -res.state.positions[p.n - 1].z();
    CHECK(droop <= prev + 1e-9);
    prev = droop;
  }
}

TEST_CASE("no particle ends up inside the ring or floor") {
  RingConfig ring;
  ring.center = Vec3(0, 0, 0.12);
  ring.inner_radius = 0.015;
  ring.outer_radius = 0.04;
  ring.depth = 0.04;
  ring.angle = 0.4;
  World w;
  w.ring = ring;

  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    RopeParams p = flex_sweep_to_params(rng.uniform(0.1, 1.0), 20);
    RopeState s = init_rope(
        p, Vec3(rng.uniform(-0.08, 0.02), rng.uniform(-0.02, 0.02), 0.2 + rng.uniform(0, 0.05)),
        Vec3(1, 0, 0));
    for (int k = 0; k < 400; ++k) {
      s = step(s, p, w);
      for (const Vec3& q : s.positions) {
        CHECK(q.z() > -1e-12);  // never below floor by more than the margin
        CHECK_FALSE(dlo::testing::inside_ring_solid(q, ring, w.contact_margin));
      }
    }
  }
}

TEST_CASE("divergence raises SimulationDiverged") {
  RopeParams p;
  p.n = 4;
  RopeState s = init_rope(p, Vec3::Zero(), Vec3(1, 0, 0));
  s.positions[2].x() = std::numeric_limits<double>::quiet_NaN();
  World w;
  CHECK_THROWS_AS(step(s, p, w), SimulationDiverged);
}

TEST_CASE("trajectory csv dump") {
  RopeParams p;
  p.n = 4;
  RopeState s = init_rope(p, Vec3(0, 0, 0.3), Vec3(1, 0, 0));
  World w;
  TrajectoryRecorder rec;
  for (int k = 0; k < 3; ++k) {
    s = step(s, p, w);
    rec.record(s);
  }
  const std::string path = "traj_test.csv";
  rec.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "step,particle_index,x,y,z");
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3 * 4);
  std::remove(path.c_str());
}

}  // TEST_SUITE
