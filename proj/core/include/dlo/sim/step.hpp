#pragma once

#include "dlo/sim/rope.hpp"
#include "dlo/sim/world.hpp"

namespace dlo::sim {

/// One position-based-dynamics step: integrate gravity, predict, run
/// solver_iters rounds of constraint projection (adjacent distance at
/// stiffness 1, second-neighbor springs, bending, pins, collisions),
/// derive velocities from the position delta, damp.
/// Throws SimulationDiverged when non-finite state appears.
RopeState step(const RopeState& state, const RopeParams& params, const World& world);

/// Result of settling a rope until it is quasi-static.
struct SettleResult {
  RopeState state;
  bool converged = false;  ///< max particle speed dropped below vel_tol
  int steps = 0;
};

/// Step until max particle speed < vel_tol or max_steps is hit.
SettleResult settle_quasi_static(const RopeState& state, const RopeParams& params,
                                 const World& world, int max_steps = 2000,
                                 double vel_tol = 1e-3);

namespace detail {

/// Symmetric PBD distance projection: move a and b toward/apart so that
/// |a-b| approaches rest, weighted by inverse masses, scaled by k.
void project_pair(Vec3& a, Vec3& b, double inv_mass_a, double inv_mass_b, double rest, double k);

/// Bending projection for a particle triple: pulls the middle particle
/// toward the centroid of the triple (and the ends the opposite way),
/// momentum-free, exact at k = 1. Equal masses assumed.
void project_straightness(Vec3& a, Vec3& mid, Vec3& b, double k);

}  // namespace detail

}  // namespace dlo::sim
