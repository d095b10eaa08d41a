#include "dlo/flex/projection.hpp"

#include <cmath>

namespace dlo::flex {

namespace {

void check_normal(const Vec3& n) {
  if (!almost_unit(n) || std::abs(n.z()) > 1e-9)
    throw ValidationError("plane_normal must be a horizontal unit vector");
}

// Returns flexibility for the window (base, base+1, base+3) or NaN when an
// x-spacing inside the window is degenerate.
double window_flexibility(const ProjectedCurve& c, int base) {
  constexpr double kMinDx = 1e-9;
  const Vec2& p0 = c.points[base];
  const Vec2& p1 = c.points[base + 1];
  const Vec2& p3 = c.points[base + 3];
  const double dx_near = p1.x() - p0.x();
  const double dx_far = p3.x() - p1.x();
  const double mid_sep = 0.5 * (p3.x() - p0.x());
  if (std::abs(dx_near) < kMinDx || std::abs(dx_far) < kMinDx || std::abs(mid_sep) < kMinDx)
    return std::numeric_limits<double>::quiet_NaN();
  const double slope_near = (p1.y() - p0.y()) / dx_near;
  const double slope_far = (p3.y() - p1.y()) / dx_far;
  return (slope_far - slope_near) /
         (mid_sep * std::pow(1.0 + slope_near * slope_near, 1.5));
}

}  // namespace

Vec2 project_point(const Vec3& p, const Vec3& plane_normal) {
  check_normal(plane_normal);
  // x axis = n x (0,0,-1) = (-ny, nx, 0); y axis = (0,0,-1).
  const double x = -plane_normal.y() * p.x() + plane_normal.x() * p.y();
  const double y = -p.z();
  return Vec2(x, y);
}

ProjectedCurve project_to_gripper_plane(std::span<const Vec3> positions,
                                        std::span<const int> indices,
                                        const Vec3& plane_normal) {
  check_normal(plane_normal);
  if (positions.size() < 4)
    throw ValidationError("project_to_gripper_plane: need at least 4 points");
  if (!indices.empty() && indices.size() != positions.size())
    throw ValidationError("project_to_gripper_plane: indices/positions size mismatch");
  ProjectedCurve c;
  c.points.reserve(positions.size());
  for (const Vec3& p : positions) {
    if (!p.allFinite()) throw ValidationError("project_to_gripper_plane: non-finite point");
    c.points.push_back(project_point(p, plane_normal));
  }
  if (indices.empty()) {
    c.source_indices.resize(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) c.source_indices[i] = static_cast<int>(i);
  } else {
    c.source_indices.assign(indices.begin(), indices.end());
  }
  return c;
}

double compute_flexibility(const ProjectedCurve& curve, int ip) {
  const int n = static_cast<int>(curve.points.size());
  if (ip < 0 || ip + 3 >= n)
    throw ValidationError("compute_flexibility: window ip..ip+3 out of range");
  double f = window_flexibility(curve, ip);
  if (std::isnan(f)) {
    if (ip + 4 >= n)
      throw DegenerateGeometry("compute_flexibility: coincident x coordinates, no fallback window");
    f = window_flexibility(curve, ip + 1);
    if (std::isnan(f))
      throw DegenerateGeometry("compute_flexibility: coincident x coordinates in both windows");
  }
  return f;
}

double point_point_distance(const ProjectedCurve& a, const ProjectedCurve& b) {
  if (a.points.size() != b.points.size())
    throw ValidationError("point_point_distance: point count mismatch");
  if (a.points.empty()) throw ValidationError("point_point_distance: empty curves");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) acc += (a.points[i] - b.points[i]).norm();
  return acc / static_cast<double>(a.points.size());
}

}  // namespace dlo::flex
