#pragma once

#include <cstdint>
#include <vector>

#include "dlo/env/insertion.hpp"

namespace dlo::policy {

/// Grasp-index mapping for the flexibility-aware visual baseline:
/// index = clamp(round(alpha * sqrt(max(f, 0)) + beta), 1, n - 2).
/// Defaults were frozen by calibrate_vb_coeffs over a 5-point material sweep.
struct VbCoeffs {
  double alpha = 5.0;
  double beta = 5.0;
};

/// Heuristic one-shot insertion: hold the rope horizontally over the ring
/// entry, rotate by the angle subtended at the grip between the ring center
/// and the (assumed rigid) rope tip, then translate through along the axis.
/// With use_f the grasp index shifts toward the tip for floppier ropes;
/// without it the grasp index is fixed at particle 5.
env::PrimitiveAction visual_baseline_action(const env::Observation& obs,
                                            const env::ActionBounds& bounds, bool use_f,
                                            const VbCoeffs& coeffs = {});

/// Grid-search (alpha, beta) by success rate over a small material sweep;
/// used once to pin the VbCoeffs defaults.
VbCoeffs calibrate_vb_coeffs(const env::EnvConfig& cfg, const std::vector<double>& alphas,
                             const std::vector<double>& betas, int sweep_points,
                             int episodes_per_point, std::uint64_t seed);

}  // namespace dlo::policy
