#include "dlo/sim/world.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace dlo::sim {

namespace {
constexpr double kThreeQuarterPi = 2.356194490192344928846982537459627163;
}

void RingConfig::validate() const {
  if (!(inner_radius > 0) || !(inner_radius < outer_radius))
    throw ValidationError("RingConfig: need 0 < inner_radius < outer_radius");
  if (!(depth > 0)) throw ValidationError("RingConfig: depth must be > 0");
  if (!almost_unit(plane_normal) || std::abs(plane_normal.z()) > 1e-9)
    throw ValidationError("RingConfig: plane_normal must be a horizontal unit vector");
  if (angle < 0 || angle > kThreeQuarterPi + 1e-12)
    throw ValidationError("RingConfig: angle must be in [0, 3pi/4]");
}

Vec3 RingConfig::plane_tangent() const {
  // Matches the gripper projection frame: n x (0,0,-1).
  return Vec3(-plane_normal.y(), plane_normal.x(), 0.0);
}

Vec3 RingConfig::axis() const {
  return std::cos(angle) * Vec3(0, 0, 1) + std::sin(angle) * plane_tangent();
}

Vec3 RingConfig::lateral() const { return axis().cross(plane_normal).normalized() * -1.0; }

double RingConfig::radial(const Vec3& p) const {
  const Vec3 d = p - center;
  const Vec3 a = axis();
  return (d - d.dot(a) * a).norm();
}

Vec3 collide_ring(const Vec3& position, const RingConfig& ring, double margin) {
  const Vec3 a = ring.axis();
  const Vec3 d = position - ring.center;
  const double s = d.dot(a);
  const Vec3 radial_vec = d - s * a;
  const double rho = radial_vec.norm();

  const double half = ring.depth / 2.0;
  const bool inside = std::abs(s) < half + margin && rho > ring.inner_radius - margin &&
                      rho < ring.outer_radius + margin;
  if (!inside) return position;

  // Candidate push-outs; smallest displacement wins.
  const double to_inner = rho - (ring.inner_radius - margin);
  const double to_outer = (ring.outer_radius + margin) - rho;
  const double to_entry = (half + margin) - s;
  const double to_exit = s + (half + margin);

  double best = to_entry;
  int which = 0;  // 0 entry face, 1 exit face, 2 inner wall, 3 outer wall
  if (to_exit < best) { best = to_exit; which = 1; }
  if (to_inner < best) { best = to_inner; which = 2; }
  if (to_outer < best) { best = to_outer; which = 3; }

  switch (which) {
    case 0: return position + a * to_entry;
    case 1: return position - a * to_exit;
    case 2: {
      if (rho < 1e-12) return position + a * to_entry;  // on-axis fallback
      const Vec3 rhat = radial_vec / rho;
      return position - rhat * to_inner;
    }
    default: {
      if (rho < 1e-12) return position + a * to_entry;
      const Vec3 rhat = radial_vec / rho;
      return position + rhat * to_outer;
    }
  }
}

}  // namespace dlo::sim
