#include "dlo/policy/featurize.hpp"

#include <cmath>

namespace dlo::policy {

int feature_dim(int n_particles, bool with_f) { return 3 * n_particles + 2 + (with_f ? 1 : 0); }

Eigen::VectorXd featurize(const env::Observation& obs) {
  sim::RingConfig frame;
  frame.plane_normal = obs.plane_normal;
  frame.angle = obs.ring_angle;
  const Vec3 axis = frame.axis();
  const Vec3 lateral = frame.lateral();
  const Vec3& normal = obs.plane_normal;

  const int n = static_cast<int>(obs.rope.size());
  Eigen::VectorXd out(feature_dim(n, obs.flexibility.has_value()));
  for (int i = 0; i < n; ++i) {
    const Vec3 d = obs.rope[i] - obs.ring_center;
    out[3 * i + 0] = d.dot(axis);
    out[3 * i + 1] = d.dot(lateral);
    out[3 * i + 2] = d.dot(normal);
  }
  out[3 * n + 0] = obs.ring_radius;
  out[3 * n + 1] = obs.ring_angle;
  if (obs.flexibility) out[3 * n + 2] = std::asinh(*obs.flexibility);
  return out;
}

}  // namespace dlo::policy
