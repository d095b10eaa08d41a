#include "dlo/policy/baseline.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <iostream>

#include "dlo/rng.hpp"

namespace dlo::policy {

env::PrimitiveAction visual_baseline_action(const env::Observation& obs,
                                            const env::ActionBounds& bounds, bool use_f,
                                            const VbCoeffs& coeffs) {
  const int n = static_cast<int>(obs.rope.size());
  if (n < 4) throw ValidationError("visual_baseline_action: too few particles");
  if (use_f && !obs.flexibility)
    throw ValidationError("visual_baseline_action: flexibility requested but absent");

  int grasp_idx = 5;
  if (use_f) {
    const double f = std::max(*obs.flexibility, 0.0);
    grasp_idx = static_cast<int>(std::lround(coeffs.alpha * std::sqrt(f) + coeffs.beta));
    grasp_idx = std::clamp(grasp_idx, 1, n - 2);
  }

  sim::RingConfig frame;
  frame.plane_normal = obs.plane_normal;
  frame.angle = obs.ring_angle;
  frame.center = obs.ring_center;
  const Vec3 axis = frame.axis();
  const Vec3 lateral = frame.lateral();

  // Hold horizontally centered over the entry rectangle.
  const Vec2 start_pos(0.5 * (bounds.start_a_lo + bounds.start_a_hi), 0.0);
  const double start_rot = 0.0;
  const Vec3 start_world = obs.ring_center + axis * start_pos.x() + lateral * start_pos.y();

  // Straight-rope tip prediction, then the angle subtended at the grip
  // between tip and ring center is the rotation that would line them up.
  const Vec3 tangent(-obs.plane_normal.y(), obs.plane_normal.x(), 0.0);
  const double hang_len = 0.012 * (n - 1 - grasp_idx);
  const Vec3 tip_pred = start_world + tangent * hang_len;
  const Vec3 v_tip = tip_pred - start_world;
  const Vec3 v_ring = obs.ring_center - start_world;
  const double rotate_by =
      std::atan2(v_tip.cross(v_ring).dot(obs.plane_normal), v_tip.dot(v_ring));

  const Vec2 end_pos(0.5 * (bounds.end_a_lo + bounds.end_a_hi), 0.0);
  return env::PrimitiveAction::clamped(static_cast<double>(grasp_idx) / (n - 1), start_pos,
                                       end_pos, start_rot, start_rot + rotate_by, bounds);
}

VbCoeffs calibrate_vb_coeffs(const env::EnvConfig& cfg, const std::vector<double>& alphas,
                             const std::vector<double>& betas, int sweep_points,
                             int episodes_per_point, std::uint64_t seed) {
  VbCoeffs best;
  int best_successes = -1;
  for (double alpha : alphas) {
    for (double beta : betas) {
      const VbCoeffs cand{alpha, beta};
      int successes = 0;
      for (int sp = 0; sp < sweep_points; ++sp) {
        env::EnvConfig point_cfg = cfg;
        const double s = cfg.sweep_lo +
                         (cfg.sweep_hi - cfg.sweep_lo) *
                             (sweep_points == 1 ? 0.0 : static_cast<double>(sp) / (sweep_points - 1));
        point_cfg.sweep_lo = point_cfg.sweep_hi = s;
        point_cfg.sweep_levels = 1;
        point_cfg.provide_f = true;
        for (int ep = 0; ep < episodes_per_point; ++ep) {
          auto [obs, scene] =
              env::reset(point_cfg, Rng::stream_seed(seed, "vb/calib", sp * 1000 + ep));
          const env::ActionBounds bounds = env::ActionBounds::for_ring(scene.ring);
          const env::PrimitiveAction action = visual_baseline_action(obs, bounds, true, cand);
          if (env::execute_episode(scene, action).success) ++successes;
        }
      }
      if (successes > best_successes) {
        best_successes = successes;
        best = cand;
      }
    }
  }
  std::cerr << "vb calibration: alpha=" << best.alpha << " beta=" << best.beta
            << " successes=" << best_successes << "\n";
  return best;
}

}  // namespace dlo::policy
