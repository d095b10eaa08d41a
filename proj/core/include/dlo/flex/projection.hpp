#pragma once

#include <span>
#include <vector>

#include "dlo/common.hpp"

namespace dlo::flex {

/// A rope configuration projected into the vertical gripper plane.
/// x runs along the horizontal in-plane direction, y along the gripper
/// z-axis which points down, so a sagging rope has increasing y.
struct ProjectedCurve {
  std::vector<Vec2> points;         ///< ordered by particle index
  std::vector<int> source_indices;  ///< originating particle indices
};

/// Project a single world point into the gripper plane with normal
/// `plane_normal` = [xn, yn, 0], unit. x = (n x z_g) . p, y = z_g . p with
/// z_g = [0, 0, -1].
Vec2 project_point(const Vec3& p, const Vec3& plane_normal);

/// Project a particle subset (>= 4 points) into the gripper plane.
/// `indices` follow `positions` and are recorded as source_indices.
ProjectedCurve project_to_gripper_plane(std::span<const Vec3> positions,
                                        std::span<const int> indices,
                                        const Vec3& plane_normal);

/// Thrown when the referenced window has coincident x coordinates and the
/// one-index fallback is degenerate too.
class DegenerateGeometry : public std::runtime_error {
 public:
  explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};

/// Flexibility of the curve at local index ip: the discrete curvature-like
/// quantity built from the slope change between chords (ip -> ip+1) and
/// (ip+1 -> ip+3), normalized by the chord-midpoint separation and the usual
/// (1 + slope^2)^1.5 factor. Sign convention: a rope sagging downward
/// (y increasing away from the grasp) measures positive; negative values
/// mean the curve bends upward, which only very stiff ropes do.
/// Falls back to the ip+1 window when an x-spacing degenerates; throws
/// DegenerateGeometry when the fallback degenerates as well.
double compute_flexibility(const ProjectedCurve& curve, int ip);

/// Mean Euclidean distance over index-paired points. Curves must have equal
/// point counts.
double point_point_distance(const ProjectedCurve& a, const ProjectedCurve& b);

}  // namespace dlo::flex
