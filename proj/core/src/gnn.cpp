#include "dlo/nn/gnn.hpp"

#include <cmath>

namespace dlo::nn {

namespace {

// Mean over chain neighbors: row i averages rows i-1 and i+1 when present.
Eigen::MatrixXd neighbor_mean(const Eigen::MatrixXd& h) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd m(n, h.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == 0)
      m.row(i) = h.row(1);
    else if (i == n - 1)
      m.row(i) = h.row(n - 2);
    else
      m.row(i) = 0.5 * (h.row(i - 1) + h.row(i + 1));
  }
  return m;
}

// Adjoint of neighbor_mean: scatter each row's gradient back to the rows it
// averaged.
Eigen::MatrixXd neighbor_mean_adjoint(const Eigen::MatrixXd& dm) {
  const Eigen::Index n = dm.rows();
  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(n, dm.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == 0)
      dh.row(1) += dm.row(0);
    else if (i == n - 1)
      dh.row(n - 2) += dm.row(n - 1);
    else {
      dh.row(i - 1) += 0.5 * dm.row(i);
      dh.row(i + 1) += 0.5 * dm.row(i);
    }
  }
  return dh;
}

double uniform_bound_init(Eigen::MatrixXd& m, double fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(fan_in);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
  return bound;
}

}  // namespace

ChainGnn::ChainGnn(int hidden, Rng& rng) {
  if (hidden < 1) throw ValidationError("ChainGnn: hidden width must be >= 1");
  embed_w_.resize(hidden, kNodeDim);
  uniform_bound_init(embed_w_, kNodeDim, rng);
  embed_b_ = Eigen::VectorXd::Zero(hidden);
  for (int l = 0; l < kRounds; ++l) {
    Eigen::MatrixXd w(hidden, 2 * hidden);
    uniform_bound_init(w, 2.0 * hidden, rng);
    round_w_.push_back(std::move(w));
    round_b_.push_back(Eigen::VectorXd::Zero(hidden));
  }
  Eigen::MatrixXd r(hidden, 1);
  uniform_bound_init(r, hidden, rng);
  readout_w_ = r.col(0);
  readout_b_ = 0.0;
}

double ChainGnn::forward(const Eigen::MatrixXd& nodes) const {
  Cache cache;
  return forward(nodes, cache);
}

double ChainGnn::forward(const Eigen::MatrixXd& nodes, Cache& cache) const {
  if (nodes.rows() < 2) throw ValidationError("ChainGnn::forward: need at least 2 nodes");
  if (nodes.cols() != kNodeDim) throw ValidationError("ChainGnn::forward: nodes must be n x 2");
  cache.net = this;
  cache.nodes = nodes;
  cache.states.clear();

  Eigen::MatrixXd h = nodes * embed_w_.transpose();
  h.rowwise() += embed_b_.transpose();
  cache.states.push_back(h);

  for (int l = 0; l < kRounds; ++l) {
    const Eigen::MatrixXd m = neighbor_mean(h);
    Eigen::MatrixXd concat(h.rows(), 2 * h.cols());
    concat << h, m;
    Eigen::MatrixXd z = concat * round_w_[l].transpose();
    z.rowwise() += round_b_[l].transpose();
    h = z.array().tanh().matrix();
    cache.states.push_back(h);
  }

  const Eigen::VectorXd pooled = h.colwise().mean().transpose();
  return readout_w_.dot(pooled) + readout_b_;
}

ChainGnn::Grads ChainGnn::backward(const Cache& cache, double out_grad) const {
  if (cache.net != this || cache.states.size() != kRounds + 1)
    throw ValidationError("ChainGnn::backward: cache does not match this net");

  Grads g = zero_grads();
  const Eigen::MatrixXd& hfinal = cache.states.back();
  const double n = static_cast<double>(hfinal.rows());

  const Eigen::VectorXd pooled = hfinal.colwise().mean().transpose();
  g.readout_w = pooled * out_grad;
  g.readout_b = out_grad;

  // d pooled -> d hfinal (mean pooling spreads 1/n to every row)
  Eigen::MatrixXd dh =
      (Eigen::VectorXd::Constant(hfinal.rows(), out_grad / n) * readout_w_.transpose());

  for (int l = kRounds - 1; l >= 0; --l) {
    const Eigen::MatrixXd& hout = cache.states[l + 1];  // tanh output of this round
    const Eigen::MatrixXd& hin = cache.states[l];
    const Eigen::MatrixXd dz =
        dh.cwiseProduct((1.0 - hout.array().square()).matrix());
    const Eigen::MatrixXd m = neighbor_mean(hin);
    Eigen::MatrixXd concat(hin.rows(), 2 * hin.cols());
    concat << hin, m;
    g.round_w[l] = dz.transpose() * concat;
    g.round_b[l] = dz.colwise().sum().transpose();
    const Eigen::MatrixXd dconcat = dz * round_w_[l];
    const Eigen::MatrixXd dh_direct = dconcat.leftCols(hin.cols());
    const Eigen::MatrixXd dm = dconcat.rightCols(hin.cols());
    dh = dh_direct + neighbor_mean_adjoint(dm);
  }

  g.embed_w = dh.transpose() * cache.nodes;
  g.embed_b = dh.colwise().sum().transpose();
  g.nodes = dh * embed_w_;
  return g;
}

ChainGnn::Grads ChainGnn::zero_grads() const {
  Grads g;
  g.embed_w = Eigen::MatrixXd::Zero(embed_w_.rows(), embed_w_.cols());
  g.embed_b = Eigen::VectorXd::Zero(embed_b_.size());
  for (int l = 0; l < kRounds; ++l) {
    g.round_w.push_back(Eigen::MatrixXd::Zero(round_w_[l].rows(), round_w_[l].cols()));
    g.round_b.push_back(Eigen::VectorXd::Zero(round_b_[l].size()));
  }
  g.readout_w = Eigen::VectorXd::Zero(readout_w_.size());
  g.readout_b = 0.0;
  g.nodes.resize(0, kNodeDim);
  return g;
}

void ChainGnn::Grads::add(const Grads& other) {
  embed_w += other.embed_w;
  embed_b += other.embed_b;
  for (std::size_t l = 0; l < round_w.size(); ++l) {
    round_w[l] += other.round_w[l];
    round_b[l] += other.round_b[l];
  }
  readout_w += other.readout_w;
  readout_b += other.readout_b;
}

void ChainGnn::Grads::scale(double s) {
  embed_w *= s;
  embed_b *= s;
  for (std::size_t l = 0; l < round_w.size(); ++l) {
    round_w[l] *= s;
    round_b[l] *= s;
  }
  readout_w *= s;
  readout_b *= s;
}

std::vector<Param> ChainGnn::params(const std::string& prefix) {
  std::vector<Param> out;
  out.push_back({prefix + "embed_w", embed_w_.data(), static_cast<int>(embed_w_.rows()),
                 static_cast<int>(embed_w_.cols())});
  out.push_back({prefix + "embed_b", embed_b_.data(), static_cast<int>(embed_b_.size()), 1});
  for (int l = 0; l < kRounds; ++l) {
    out.push_back({prefix + "round" + std::to_string(l) + "_w", round_w_[l].data(),
                   static_cast<int>(round_w_[l].rows()), static_cast<int>(round_w_[l].cols())});
    out.push_back({prefix + "round" + std::to_string(l) + "_b", round_b_[l].data(),
                   static_cast<int>(round_b_[l].size()), 1});
  }
  out.push_back({prefix + "readout_w", readout_w_.data(), static_cast<int>(readout_w_.size()), 1});
  out.push_back({prefix + "readout_b", &readout_b_, 1, 1});
  return out;
}

std::vector<Param> ChainGnn::grad_views(Grads& g, const std::string& prefix) {
  std::vector<Param> out;
  out.push_back({prefix + "embed_w", g.embed_w.data(), static_cast<int>(g.embed_w.rows()),
                 static_cast<int>(g.embed_w.cols())});
  out.push_back({prefix + "embed_b", g.embed_b.data(), static_cast<int>(g.embed_b.size()), 1});
  for (std::size_t l = 0; l < g.round_w.size(); ++l) {
    out.push_back({prefix + "round" + std::to_string(l) + "_w", g.round_w[l].data(),
                   static_cast<int>(g.round_w[l].rows()), static_cast<int>(g.round_w[l].cols())});
    out.push_back({prefix + "round" + std::to_string(l) + "_b", g.round_b[l].data(),
                   static_cast<int>(g.round_b[l].size()), 1});
  }
  out.push_back({prefix + "readout_w", g.readout_w.data(), static_cast<int>(g.readout_w.size()), 1});
  out.push_back({prefix + "readout_b", &g.readout_b, 1, 1});
  return out;
}

}  // namespace dlo::nn
