#pragma once

#include <vector>

#include "dlo/nn/dense.hpp"

namespace dlo::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over a fixed list of parameter views. Moment buffers are laid out in
/// the order init() saw the params; step() must be called with views in the
/// same layout.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void init(const std::vector<Param>& params);
  void step(const std::vector<Param>& params, const std::vector<Param>& grads);

  long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  AdamConfig& config() { return cfg_; }

  /// Flat moment state, for checkpointing.
  const std::vector<double>& first_moments() const { return m_; }
  const std::vector<double>& second_moments() const { return v_; }
  void restore(const std::vector<double>& m, const std::vector<double>& v, long t);

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::vector<int> sizes_;
  long t_ = 0;
};

}  // namespace dlo::nn
