#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dlo/nn/adam.hpp"
#include "dlo/nn/dense.hpp"
#include "dlo/nn/gnn.hpp"

namespace dlo::nn {

/// One regression datum: chain node features (n x 2) and a scalar target.
/// The dense path flattens nodes row-major ((x0, y0, x1, y1, ...)).
struct RegressionSample {
  Eigen::MatrixXd nodes;
  double target = 0.0;
};

struct TrainOptions {
  int epochs = 60;
  int batch = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  /// Train against standardized targets and fold the de-standardization into
  /// the final linear layer afterwards, so predictions stay in target units.
  bool standardize_targets = true;
};

struct TrainReport {
  std::vector<double> train_mse;  ///< per epoch, target units
  std::vector<double> val_mse;    ///< NaN entries when no validation set
};

/// Minimize MSE with Adam over shuffled minibatches. Deterministic for a
/// fixed seed. Throws TrainingDiverged when the loss goes non-finite;
/// epochs = 0 leaves the model untouched.
TrainReport train_regressor(DenseNet& net, const std::vector<RegressionSample>& train,
                            const std::vector<RegressionSample>& val, const TrainOptions& opts);
TrainReport train_regressor(ChainGnn& net, const std::vector<RegressionSample>& train,
                            const std::vector<RegressionSample>& val, const TrainOptions& opts);

Eigen::VectorXd flatten_nodes(const Eigen::MatrixXd& nodes);

double predict(const DenseNet& net, const Eigen::MatrixXd& nodes);
double predict(const ChainGnn& net, const Eigen::MatrixXd& nodes);

}  // namespace dlo::nn
