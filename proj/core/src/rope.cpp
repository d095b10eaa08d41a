#include "dlo/sim/rope.hpp"

#include <cmath>

namespace dlo::sim {

void RopeParams::validate() const {
  if (n < 4) throw ValidationError("RopeParams: n must be >= 4");
  if (!(rest_len > 0)) throw ValidationError("RopeParams: rest_len must be > 0");
  if (!(particle_mass > 0)) throw ValidationError("RopeParams: particle_mass must be > 0");
  if (bend_stiffness < 0 || bend_stiffness > 1)
    throw ValidationError("RopeParams: bend_stiffness must be in [0, 1]");
  if (extra_spring_stiffness < 0 || extra_spring_stiffness > 1)
    throw ValidationError("RopeParams: extra_spring_stiffness must be in [0, 1]");
  if (solver_iters < 1) throw ValidationError("RopeParams: solver_iters must be >= 1");
  if (damping < 0 || damping >= 1) throw ValidationError("RopeParams: damping must be in [0, 1)");
  if (!(dt > 0)) throw ValidationError("RopeParams: dt must be > 0");
}

bool RopeState::finite() const {
  for (const Vec3& p : positions)
    if (!p.allFinite()) return false;
  for (const Vec3& v : velocities)
    if (!v.allFinite()) return false;
  return true;
}

RopeState init_rope(const RopeParams& params, const Vec3& base, const Vec3& direction) {
  params.validate();
  if (!almost_unit(direction)) throw ValidationError("init_rope: direction must be unit length");
  RopeState s;
  s.positions.reserve(params.n);
  s.velocities.assign(params.n, Vec3::Zero());
  for (int i = 0; i < params.n; ++i)
    s.positions.push_back(base + direction * (params.rest_len * i));
  return s;
}

RopeParams flex_sweep_to_params(double s, int n) {
  if (s < 0 || s > 1) throw ValidationError("flex_sweep_to_params: s must be in [0, 1]");
  RopeParams p;
  p.n = n;
  p.rest_len = 0.012;
  p.particle_mass = 0.02;
  p.bend_stiffness = s;
  p.extra_spring_stiffness = s;
  p.solver_iters = static_cast<int>(std::lround(2.0 + 18.0 * s));
  p.damping = 0.02;
  p.dt = 0.005;
  return p;
}

double max_stretch_ratio(const RopeState& state, const RopeParams& params) {
  if (state.size() < 2) throw ValidationError("max_stretch_ratio: need at least 2 particles");
  double worst = 0.0;
  for (int i = 0; i + 1 < state.size(); ++i) {
    const double len = (state.positions[i + 1] - state.positions[i]).norm();
    worst = std::max(worst, len / params.rest_len);
  }
  return worst;
}

}  // namespace dlo::sim
