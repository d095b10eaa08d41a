#include "dlo/nn/adam.hpp"

#include <cmath>

namespace dlo::nn {

void Adam::init(const std::vector<Param>& params) {
  sizes_.clear();
  std::size_t total = 0;
  for (const Param& p : params) {
    sizes_.push_back(p.size());
    total += static_cast<std::size_t>(p.size());
  }
  m_.assign(total, 0.0);
  v_.assign(total, 0.0);
  t_ = 0;
}

void Adam::step(const std::vector<Param>& params, const std::vector<Param>& grads) {
  if (params.size() != sizes_.size() || grads.size() != sizes_.size())
    throw ValidationError("Adam::step: parameter layout does not match init()");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  std::size_t off = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != sizes_[i] || grads[i].size() != sizes_[i])
      throw ValidationError("Adam::step: tensor size does not match init()");
    double* x = params[i].data;
    const double* g = grads[i].data;
    for (int k = 0; k < sizes_[i]; ++k) {
      double& m = m_[off + k];
      double& v = v_[off + k];
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g[k];
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g[k] * g[k];
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      x[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    off += static_cast<std::size_t>(sizes_[i]);
  }
}

void Adam::restore(const std::vector<double>& m, const std::vector<double>& v, long t) {
  if (m.size() != m_.size() || v.size() != v_.size())
    throw ValidationError("Adam::restore: moment size mismatch");
  m_ = m;
  v_ = v;
  t_ = t;
}

}  // namespace dlo::nn
