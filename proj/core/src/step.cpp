#include "dlo/sim/step.hpp"

#include <cmath>

namespace dlo::sim {

namespace detail {

void project_pair(Vec3& a, Vec3& b, double inv_mass_a, double inv_mass_b, double rest, double k) {
  const double w = inv_mass_a + inv_mass_b;
  if (w <= 0.0 || k <= 0.0) return;
  const Vec3 delta = a - b;
  const double len = delta.norm();
  if (len < 1e-12) return;
  const Vec3 corr = delta * ((len - rest) / (len * w)) * k;
  a -= corr * inv_mass_a;
  b += corr * inv_mass_b;
}

void project_straightness(Vec3& a, Vec3& mid, Vec3& b, double k) {
  // Distance of the middle particle from the triple's centroid; zero for a
  // straight, evenly spaced chain. Restoring displacement is linear in the
  // deflection, unlike an end-to-end distance constraint.
  const Vec3 u = (2.0 * mid - a - b) / 3.0;
  const double dist = u.norm();
  if (dist < 1e-14 || k <= 0.0) return;
  const Vec3 corr = k * u;
  mid -= corr;
  a += 0.5 * corr;
  b += 0.5 * corr;
}

}  // namespace detail

namespace {

constexpr double kGravity = 9.81;

void apply_pins(RopeState& s, std::vector<Vec3>& pred) {
  if (s.grasped_index) pred[*s.grasped_index] = *s.grasp_target;
  for (const auto& [idx, target] : s.aux_pins) pred[idx] = target;
}

bool is_pinned(const RopeState& s, int i) {
  if (s.grasped_index && *s.grasped_index == i) return true;
  for (const auto& [idx, target] : s.aux_pins)
    if (idx == i) return true;
  return false;
}

}  // namespace

RopeState step(const RopeState& state, const RopeParams& params, const World& world) {
  const int n = state.size();
  const double inv_mass = 1.0 / params.particle_mass;
  const double h = params.rest_len;

  RopeState next = state;

  // Gravity + prediction.
  std::vector<Vec3> pred(n);
  for (int i = 0; i < n; ++i) {
    next.velocities[i].z() -= kGravity * params.dt;
    pred[i] = state.positions[i] + next.velocities[i] * params.dt;
  }

  const double k_extra = params.extra_spring_stiffness;
  const double k_bend = params.bend_stiffness;

  for (int it = 0; it < params.solver_iters; ++it) {
    // Symmetric sweeps: Gauss-Seidel along a hanging chain converges far
    // faster when each round runs both directions.
    for (int i = 0; i + 1 < n; ++i)
      detail::project_pair(pred[i], pred[i + 1], inv_mass, inv_mass, h, 1.0);
    for (int i = n - 2; i >= 0; --i)
      detail::project_pair(pred[i], pred[i + 1], inv_mass, inv_mass, h, 1.0);
    if (k_extra > 0.0) {
      for (int i = 0; i + 2 < n; ++i)
        detail::project_pair(pred[i], pred[i + 2], inv_mass, inv_mass, 2.0 * h, k_extra);
      for (int i = n - 3; i >= 0; --i)
        detail::project_pair(pred[i], pred[i + 2], inv_mass, inv_mass, 2.0 * h, k_extra);
    }
    if (k_bend > 0.0) {
      for (int i = 0; i + 2 < n; ++i)
        detail::project_straightness(pred[i], pred[i + 1], pred[i + 2], k_bend);
      for (int i = n - 3; i >= 0; --i)
        detail::project_straightness(pred[i], pred[i + 1], pred[i + 2], k_bend);
    }
    apply_pins(next, pred);
    for (int i = 0; i < n; ++i) {
      if (is_pinned(next, i)) continue;
      if (world.floor && pred[i].z() < world.contact_margin)
        pred[i].z() = world.contact_margin;
      if (world.ring) pred[i] = collide_ring(pred[i], *world.ring, world.contact_margin);
    }
  }
  apply_pins(next, pred);

  // Velocity update + damping.
  for (int i = 0; i < n; ++i) {
    next.velocities[i] = (pred[i] - state.positions[i]) / params.dt;
    next.velocities[i] *= (1.0 - params.damping);
    next.positions[i] = pred[i];
  }

  if (!next.finite()) throw SimulationDiverged("non-finite rope state after step", 0);
  return next;
}

SettleResult settle_quasi_static(const RopeState& state, const RopeParams& params,
                                 const World& world, int max_steps, double vel_tol) {
  SettleResult res;
  res.state = state;
  for (int k = 0; k < max_steps; ++k) {
    try {
      res.state = step(res.state, params, world);
    } catch (const SimulationDiverged& e) {
      throw SimulationDiverged("settle diverged", k);
    }
    ++res.steps;
    double vmax = 0.0;
    for (const Vec3& v : res.state.velocities) vmax = std::max(vmax, v.norm());
    if (vmax < vel_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace dlo::sim
