#include "dlo/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dlo/rng.hpp"

namespace dlo::nn {

Eigen::VectorXd flatten_nodes(const Eigen::MatrixXd& nodes) {
  Eigen::VectorXd v(nodes.size());
  for (Eigen::Index i = 0; i < nodes.rows(); ++i)
    for (Eigen::Index j = 0; j < nodes.cols(); ++j) v[i * nodes.cols() + j] = nodes(i, j);
  return v;
}

double predict(const DenseNet& net, const Eigen::MatrixXd& nodes) {
  Eigen::MatrixXd x(1, nodes.size());
  x.row(0) = flatten_nodes(nodes).transpose();
  return net.forward(x)(0, 0);
}

double predict(const ChainGnn& net, const Eigen::MatrixXd& nodes) { return net.forward(nodes); }

namespace {

struct TargetScale {
  double mean = 0.0;
  double scale = 1.0;
};

TargetScale target_scale(const std::vector<RegressionSample>& train, bool standardize) {
  TargetScale ts;
  if (!standardize || train.empty()) return ts;
  double m = 0.0;
  for (const auto& s : train) m += s.target;
  m /= static_cast<double>(train.size());
  double var = 0.0;
  for (const auto& s : train) var += (s.target - m) * (s.target - m);
  var /= static_cast<double>(train.size());
  ts.mean = m;
  ts.scale = std::sqrt(var);
  if (ts.scale < 1e-12) ts.scale = 1.0;
  return ts;
}

// Shared epoch/batch driver. Model specifics are supplied as callables:
//   batch_update(indices) -> standardized-space batch MSE
//   full_mse(samples) -> standardized-space MSE
template <typename BatchUpdate, typename FullMse>
TrainReport run_epochs(const std::vector<RegressionSample>& train,
                       const std::vector<RegressionSample>& val, const TrainOptions& opts,
                       double scale2, BatchUpdate&& batch_update, FullMse&& full_mse) {
  TrainReport report;
  Rng shuffle_rng = Rng::stream(opts.seed, "train/shuffle");
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    // Fisher-Yates with the seeded stream.
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.uniform_int(0, i)]);

    const int bs = std::max(1, std::min<int>(opts.batch, static_cast<int>(train.size())));
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t stop = std::min(order.size(), start + bs);
      const double batch_mse =
          batch_update(std::vector<int>(order.begin() + start, order.begin() + stop));
      if (!std::isfinite(batch_mse)) throw TrainingDiverged("regression loss non-finite", epoch);
    }

    report.train_mse.push_back(full_mse(train) * scale2);
    report.val_mse.push_back(val.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : full_mse(val) * scale2);
    if (!std::isfinite(report.train_mse.back()))
      throw TrainingDiverged("regression loss non-finite", epoch);
  }
  return report;
}

}  // namespace

TrainReport train_regressor(DenseNet& net, const std::vector<RegressionSample>& train,
                            const std::vector<RegressionSample>& val, const TrainOptions& opts) {
  if (train.empty()) throw ValidationError("train_regressor: empty training set");
  if (net.output_width() != 1) throw ValidationError("train_regressor: net must output 1 value");
  if (opts.standardize_targets && net.activations().back() != Activation::identity)
    throw ValidationError("train_regressor: standardization needs a linear output layer");
  if (opts.epochs == 0) return {};

  const TargetScale ts = target_scale(train, opts.standardize_targets);

  // Pre-flatten once.
  Eigen::MatrixXd x_train(train.size(), net.input_width());
  Eigen::VectorXd y_train(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Eigen::VectorXd flat = flatten_nodes(train[i].nodes);
    if (flat.size() != net.input_width())
      throw ValidationError("train_regressor: sample width mismatch");
    x_train.row(i) = flat.transpose();
    y_train[i] = (train[i].target - ts.mean) / ts.scale;
  }
  Eigen::MatrixXd x_val(val.size(), net.input_width());
  Eigen::VectorXd y_val(val.size());
  for (std::size_t i = 0; i < val.size(); ++i) {
    x_val.row(i) = flatten_nodes(val[i].nodes).transpose();
    y_val[i] = (val[i].target - ts.mean) / ts.scale;
  }

  Adam adam({opts.lr, 0.9, 0.999, 1e-8});
  adam.init(net.params());

  auto batch_update = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd xb(idx.size(), net.input_width());
    Eigen::VectorXd yb(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      xb.row(k) = x_train.row(idx[k]);
      yb[k] = y_train[idx[k]];
    }
    DenseNet::Cache cache;
    const Eigen::MatrixXd pred = net.forward(xb, cache);
    const Eigen::VectorXd err = pred.col(0) - yb;
    const double mse = err.squaredNorm() / static_cast<double>(idx.size());
    Eigen::MatrixXd dout = (2.0 / static_cast<double>(idx.size())) * err;
    DenseNet::Grads grads = net.backward(cache, dout);
    auto gv = DenseNet::grad_views(grads);
    adam.step(net.params(), gv);
    return mse;
  };
  auto full_mse = [&](const std::vector<RegressionSample>& set) {
    const Eigen::MatrixXd& x = (&set == &train) ? x_train : x_val;
    const Eigen::VectorXd& y = (&set == &train) ? y_train : y_val;
    const Eigen::MatrixXd pred = net.forward(x);
    return (pred.col(0) - y).squaredNorm() / static_cast<double>(set.size());
  };

  TrainReport report =
      run_epochs(train, val, opts, ts.scale * ts.scale, batch_update, full_mse);

  // Fold the target scale back into the last linear layer.
  const int last = net.layer_count() - 1;
  net.weight(last) *= ts.scale;
  net.bias(last) = net.bias(last) * ts.scale + Eigen::VectorXd::Constant(1, ts.mean);
  return report;
}

TrainReport train_regressor(ChainGnn& net, const std::vector<RegressionSample>& train,
                            const std::vector<RegressionSample>& val, const TrainOptions& opts) {
  if (train.empty()) throw ValidationError("train_regressor: empty training set");
  if (opts.epochs == 0) return {};

  const TargetScale ts = target_scale(train, opts.standardize_targets);

  Adam adam({opts.lr, 0.9, 0.999, 1e-8});
  adam.init(net.params());

  auto batch_update = [&](const std::vector<int>& idx) {
    ChainGnn::Grads acc = net.zero_grads();
    double mse = 0.0;
    for (int i : idx) {
      ChainGnn::Cache cache;
      const double pred = net.forward(train[i].nodes, cache);
      const double err = pred - (train[i].target - ts.mean) / ts.scale;
      mse += err * err;
      ChainGnn::Grads g = net.backward(cache, 2.0 * err / static_cast<double>(idx.size()));
      acc.add(g);
    }
    auto gv = ChainGnn::grad_views(acc);
    adam.step(net.params(), gv);
    return mse / static_cast<double>(idx.size());
  };
  auto full_mse = [&](const std::vector<RegressionSample>& set) {
    double mse = 0.0;
    for (const auto& s : set) {
      const double err = net.forward(s.nodes) - (s.target - ts.mean) / ts.scale;
      mse += err * err;
    }
    return mse / static_cast<double>(set.size());
  };

  TrainReport report =
      run_epochs(train, val, opts, ts.scale * ts.scale, batch_update, full_mse);

  net.readout_weight() *= ts.scale;
  net.readout_bias() = net.readout_bias() * ts.scale + ts.mean;
  return report;
}

}  // namespace dlo::nn
