// Test-only oracles, independent of the library implementation paths they
// check.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dlo/sim/world.hpp"

namespace dlo::testing {

/// Central finite difference of a scalar function over a flat parameter
/// view.
inline std::vector<double> finite_diff(const std::function<double()>& eval, double* data, int size,
                                       double h = 1e-5) {
  std::vector<double> g(size);
  for (int i = 0; i < size; ++i) {
    const double saved = data[i];
    data[i] = saved + h;
    const double up = eval();
    data[i] = saved - h;
    const double down = eval();
    data[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Max |a-b| over max(1, |a|, |b|): one relative error for a whole gradient.
inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst / scale;
}

/// Brute-force distance from a point to the ring solid's surface by fine
/// sampling of all four surface patches.
inline double ring_surface_distance(const Vec3& p, const sim::RingConfig& ring,
                                    int n_angle = 720, int n_span = 200) {
  const Vec3 a = ring.axis();
  const Vec3 b = ring.lateral();
  const Vec3 n = ring.plane_normal;
  double best = 1e300;
  const double half = ring.depth / 2.0;
  for (int ia = 0; ia < n_angle; ++ia) {
    const double phi = 2.0 * M_PI * ia / n_angle;
    const Vec3 radial = std::cos(phi) * b + std::sin(phi) * n;
    for (int is = 0; is <= n_span; ++is) {
      const double t = static_cast<double>(is) / n_span;
      // faces: radius from inner to outer at both axial extremes
      const double r = ring.inner_radius + t * (ring.outer_radius - ring.inner_radius);
      best = std::min(best, (ring.center + radial * r + a * half - p).norm());
      best = std::min(best, (ring.center + radial * r - a * half - p).norm());
      // walls: axial from -half to half at both radii
      const double s = -half + t * ring.depth;
      best = std::min(best, (ring.center + radial * ring.inner_radius + a * s - p).norm());
      best = std::min(best, (ring.center + radial * ring.outer_radius + a * s - p).norm());
    }
  }
  return best;
}

/// True when the point is strictly inside the (non-inflated) ring solid.
inline bool inside_ring_solid(const Vec3& p, const sim::RingConfig& ring, double slack = 0.0) {
  const double s = ring.axial(p);
  const double rho = ring.radial(p);
  return std::abs(s) < ring.depth / 2.0 - slack && rho > ring.inner_radius + slack &&
         rho < ring.outer_radius - slack;
}

}  // namespace dlo::testing
