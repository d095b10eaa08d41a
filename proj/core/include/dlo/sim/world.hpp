#pragma once

#include <optional>

#include "dlo/common.hpp"

namespace dlo::sim {

/// Target ring: a solid annular cylinder. The ring axis lives in the
/// vertical insertion plane (normal `plane_normal`, which must be horizontal)
/// and tilts by `angle` away from world +z: angle 0 faces straight up,
/// pi/2 is horizontal, 3pi/4 points 45 degrees downward.
struct RingConfig {
  Vec3 center = Vec3::Zero();
  double angle = 0.0;            ///< rad, in [0, 3pi/4]
  double inner_radius = 0.01;    ///< bore radius (m)
  double depth = 0.04;           ///< axial extent (m)
  double outer_radius = 0.04;    ///< (m), > inner_radius
  Vec3 plane_normal = Vec3(0, 1, 0);

  void validate() const;

  /// In-plane horizontal direction; together with world z it spans the
  /// insertion plane. Equals the x axis of the gripper projection frame.
  Vec3 plane_tangent() const;
  /// Unit ring axis; entry face sits at +depth/2 along it, exit at -depth/2.
  Vec3 axis() const;
  /// In-plane direction orthogonal to axis(); {axis, lateral, plane_normal}
  /// is right-handed.
  Vec3 lateral() const;

  /// Signed axial coordinate of a point (entry face at +depth/2).
  double axial(const Vec3& p) const { return (p - center).dot(axis()); }
  /// Radial distance of a point from the ring axis.
  double radial(const Vec3& p) const;
};

/// Collision environment for a rope: optional floor plane at z=0 and an
/// optional ring. `contact_margin` is the clearance collisions project to.
struct World {
  bool floor = true;
  std::optional<RingConfig> ring;
  double contact_margin = 0.001;
};

/// Project a point out of the ring solid (inflated by `margin`) along the
/// minimal displacement direction: to the inner bore wall, the outer wall,
/// or one of the faces. Points outside the inflated solid are returned
/// unchanged. Pure function.
Vec3 collide_ring(const Vec3& position, const RingConfig& ring, double margin = 0.001);

}  // namespace dlo::sim
