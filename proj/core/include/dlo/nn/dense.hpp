#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dlo/common.hpp"
#include "dlo/rng.hpp"

namespace dlo::nn {

enum class Activation { identity, tanh_act, relu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Raw view of one parameter tensor; shared by the optimizer and the
/// checkpoint writer. Vectors are rows x 1.
struct Param {
  std::string name;
  double* data = nullptr;
  int rows = 0;
  int cols = 0;
  int size() const { return rows * cols; }
};

/// Fully connected network, f64, batched over rows.
class DenseNet {
 public:
  DenseNet() = default;
  /// widths = {in, h1, ..., out}; acts has widths.size()-1 entries.
  /// Weights uniform +-1/sqrt(fan_in), biases zero.
  DenseNet(const std::vector<int>& widths, const std::vector<Activation>& acts, Rng& rng);

  struct Cache {
    const DenseNet* net = nullptr;
    std::vector<Eigen::MatrixXd> inputs;   ///< input to each layer
    std::vector<Eigen::MatrixXd> preacts;  ///< affine outputs before activation
  };

  struct Grads {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
    Eigen::MatrixXd input;  ///< gradient w.r.t. the network input
    void add(const Grads& other);
    void scale(double s);
  };

  /// Rows are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache& cache) const;

  /// Exact reverse-mode gradients for the batch; out_grad matches the
  /// forward output shape. Rejects caches from other nets or shapes.
  Grads backward(const Cache& cache, const Eigen::MatrixXd& out_grad) const;

  Grads zero_grads() const;

  int input_width() const { return weights_.empty() ? 0 : static_cast<int>(weights_[0].cols()); }
  int output_width() const { return weights_.empty() ? 0 : static_cast<int>(weights_.back().rows()); }
  int layer_count() const { return static_cast<int>(weights_.size()); }

  std::vector<Param> params(const std::string& prefix = "");
  /// Gradient views aligned with params(); grads must outlive the views.
  static std::vector<Param> grad_views(Grads& grads, const std::string& prefix = "");

  std::vector<int> widths() const;
  const std::vector<Activation>& activations() const { return acts_; }
  Eigen::MatrixXd& weight(int layer) { return weights_[layer]; }
  Eigen::VectorXd& bias(int layer) { return biases_[layer]; }
  const Eigen::MatrixXd& weight(int layer) const { return weights_[layer]; }
  const Eigen::VectorXd& bias(int layer) const { return biases_[layer]; }

 private:
  std::vector<Eigen::MatrixXd> weights_;  ///< out x in
  std::vector<Eigen::VectorXd> biases_;
  std::vector<Activation> acts_;
};

}  // namespace dlo::nn
