#pragma once

#include <Eigen/Dense>

#include "dlo/env/insertion.hpp"

namespace dlo::policy {

/// Observation vector for the learner: particle positions expressed in the
/// ring frame (axial, lateral, normal per particle), then ring radius, ring
/// angle, and — when present — asinh of the flexibility (the raw label scale
/// is heavy-tailed). Fixed ordering and length for a given (n, with_f).
Eigen::VectorXd featurize(const env::Observation& obs);

int feature_dim(int n_particles, bool with_f);

}  // namespace dlo::policy
