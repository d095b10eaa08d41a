#include "dlo/nn/dense.hpp"

#include <cmath>

namespace dlo::nn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::tanh_act: return "tanh";
    default: return "relu";
  }
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "tanh") return Activation::tanh_act;
  if (s == "relu") return Activation::relu;
  throw ValidationError("unknown activation: " + s);
}

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::tanh_act: return z.array().tanh().matrix();
    default: return z.cwiseMax(0.0);
  }
}

Eigen::MatrixXd activation_grad(const Eigen::MatrixXd& z, Activation a) {
  switch (a) {
    case Activation::identity: return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::tanh_act: {
      const Eigen::ArrayXXd t = z.array().tanh();
      return (1.0 - t * t).matrix();
    }
    default: return (z.array() > 0.0).cast<double>().matrix();
  }
}

}  // namespace

DenseNet::DenseNet(const std::vector<int>& widths, const std::vector<Activation>& acts, Rng& rng)
    : acts_(acts) {
  if (widths.size() < 2) throw ValidationError("DenseNet: need at least input and output widths");
  if (acts.size() != widths.size() - 1)
    throw ValidationError("DenseNet: one activation per layer required");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l] <= 0 || widths[l + 1] <= 0) throw ValidationError("DenseNet: widths must be > 0");
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    Eigen::MatrixXd w(widths[l + 1], widths[l]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(widths[l + 1]));
  }
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& input) const {
  Cache cache;
  return forward(input, cache);
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& input, Cache& cache) const {
  if (input.cols() != input_width())
    throw ValidationError("DenseNet::forward: input width mismatch");
  cache.net = this;
  cache.inputs.clear();
  cache.preacts.clear();
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    cache.inputs.push_back(a);
    Eigen::MatrixXd z = a * weights_[l].transpose();
    z.rowwise() += biases_[l].transpose();
    cache.preacts.push_back(z);
    a = apply_activation(z, acts_[l]);
  }
  return a;
}

DenseNet::Grads DenseNet::backward(const Cache& cache, const Eigen::MatrixXd& out_grad) const {
  if (cache.net != this || cache.inputs.size() != weights_.size())
    throw ValidationError("DenseNet::backward: cache does not match this net");
  if (out_grad.rows() != cache.inputs[0].rows() || out_grad.cols() != output_width())
    throw ValidationError("DenseNet::backward: out_grad shape mismatch");

  Grads g = zero_grads();
  Eigen::MatrixXd da = out_grad;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const Eigen::MatrixXd dz =
        da.cwiseProduct(activation_grad(cache.preacts[l], acts_[l]));
    g.w[l] = dz.transpose() * cache.inputs[l];
    g.b[l] = dz.colwise().sum().transpose();
    da = dz * weights_[l];
  }
  g.input = da;
  return g;
}

DenseNet::Grads DenseNet::zero_grads() const {
  Grads g;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.w.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

void DenseNet::Grads::add(const Grads& other) {
  for (std::size_t l = 0; l < w.size(); ++l) {
    w[l] += other.w[l];
    b[l] += other.b[l];
  }
}

void DenseNet::Grads::scale(double s) {
  for (std::size_t l = 0; l < w.size(); ++l) {
    w[l] *= s;
    b[l] *= s;
  }
}

std::vector<Param> DenseNet::params(const std::string& prefix) {
  std::vector<Param> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back({prefix + "w" + std::to_string(l), weights_[l].data(),
                   static_cast<int>(weights_[l].rows()), static_cast<int>(weights_[l].cols())});
    out.push_back({prefix + "b" + std::to_string(l), biases_[l].data(),
                   static_cast<int>(biases_[l].size()), 1});
  }
  return out;
}

std::vector<Param> DenseNet::grad_views(Grads& grads, const std::string& prefix) {
  std::vector<Param> out;
  for (std::size_t l = 0; l < grads.w.size(); ++l) {
    out.push_back({prefix + "w" + std::to_string(l), grads.w[l].data(),
                   static_cast<int>(grads.w[l].rows()), static_cast<int>(grads.w[l].cols())});
    out.push_back({prefix + "b" + std::to_string(l), grads.b[l].data(),
                   static_cast<int>(grads.b[l].size()), 1});
  }
  return out;
}

std::vector<int> DenseNet::widths() const {
  std::vector<int> w;
  if (weights_.empty()) return w;
  w.push_back(static_cast<int>(weights_[0].cols()));
  for (const auto& m : weights_) w.push_back(static_cast<int>(m.rows()));
  return w;
}

}  // namespace dlo::nn
