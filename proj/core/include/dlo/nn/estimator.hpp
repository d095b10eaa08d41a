#pragma once

#include <string>
#include <vector>

#include "dlo/flex/dataset.hpp"
#include "dlo/nn/train.hpp"

namespace dlo::nn {

/// Dataset -> regression adapter. Curve points are centered on `center`
/// (the grip projection) before becoming node features.
std::vector<RegressionSample> to_regression_samples(const flex::FlexDataset& ds, flex::Split split,
                                                    bool include_clean, bool include_augmented,
                                                    const Vec2& center);

/// A flexibility estimator: a GNN or MLP backbone plus the input centering
/// it was trained with. This is the unit that gets checkpointed and reused
/// by evaluation.
class FlexEstimator {
 public:
  enum class Backbone { gnn, mlp };

  FlexEstimator() = default;
  static FlexEstimator make_gnn(int hidden, Rng& rng);
  /// widths are the hidden layers; input/output derived from the curve size.
  static FlexEstimator make_mlp(int curve_points, const std::vector<int>& hidden, Rng& rng);

  Backbone backbone() const { return backbone_; }
  void set_center(const Vec2& center) { center_ = center; }
  const Vec2& center() const { return center_; }

  double predict(const flex::ProjectedCurve& curve) const;

  /// Train on the dataset's train split (optionally without the augmented
  /// copies), validating on the val split.
  TrainReport train(const flex::FlexDataset& ds, const TrainOptions& opts,
                    bool include_augmented = true);

  void save(const std::string& path) const;
  static FlexEstimator load(const std::string& path);

 private:
  Backbone backbone_ = Backbone::gnn;
  ChainGnn gnn_;
  DenseNet mlp_;
  Vec2 center_ = Vec2::Zero();
};

}  // namespace dlo::nn
