#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dlo/nn/dense.hpp"

namespace dlo::nn {

/// Message-passing network over a chain graph (edges between consecutive
/// nodes). Each node carries a 2-D feature; four rounds of
/// tanh(W [own_state || neighbor_mean] + b) are followed by mean pooling and
/// a linear readout to one scalar.
class ChainGnn {
 public:
  static constexpr int kRounds = 4;
  static constexpr int kNodeDim = 2;

  ChainGnn() = default;
  ChainGnn(int hidden, Rng& rng);

  struct Cache {
    const ChainGnn* net = nullptr;
    Eigen::MatrixXd nodes;                 ///< n x 2 input
    std::vector<Eigen::MatrixXd> states;   ///< post-embed then post-round states
  };

  struct Grads {
    Eigen::MatrixXd embed_w;
    Eigen::VectorXd embed_b;
    std::vector<Eigen::MatrixXd> round_w;
    std::vector<Eigen::VectorXd> round_b;
    Eigen::VectorXd readout_w;
    double readout_b = 0.0;
    Eigen::MatrixXd nodes;  ///< gradient w.r.t. the node features
    void add(const Grads& other);
    void scale(double s);
  };

  /// nodes: one row per chain vertex, in chain order; >= 2 rows.
  double forward(const Eigen::MatrixXd& nodes) const;
  double forward(const Eigen::MatrixXd& nodes, Cache& cache) const;
  Grads backward(const Cache& cache, double out_grad) const;

  Grads zero_grads() const;
  int hidden() const { return static_cast<int>(embed_w_.rows()); }

  std::vector<Param> params(const std::string& prefix = "");
  static std::vector<Param> grad_views(Grads& grads, const std::string& prefix = "");

  Eigen::MatrixXd& embed_weight() { return embed_w_; }
  Eigen::VectorXd& readout_weight() { return readout_w_; }
  double& readout_bias() { return readout_b_; }

 private:
  Eigen::MatrixXd embed_w_;               ///< H x 2
  Eigen::VectorXd embed_b_;               ///< H
  std::vector<Eigen::MatrixXd> round_w_;  ///< H x 2H, kRounds of them
  std::vector<Eigen::VectorXd> round_b_;  ///< H
  Eigen::VectorXd readout_w_;             ///< H
  double readout_b_ = 0.0;
};

}  // namespace dlo::nn
