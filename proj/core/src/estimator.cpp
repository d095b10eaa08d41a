#include "dlo/nn/estimator.hpp"

#include "json_io.hpp"

namespace dlo::nn {

using nlohmann::json;

namespace {

Eigen::MatrixXd curve_nodes(const flex::ProjectedCurve& curve, const Vec2& center) {
  Eigen::MatrixXd nodes(curve.points.size(), 2);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    nodes(i, 0) = curve.points[i].x() - center.x();
    nodes(i, 1) = curve.points[i].y() - center.y();
  }
  return nodes;
}

}  // namespace

std::vector<RegressionSample> to_regression_samples(const flex::FlexDataset& ds, flex::Split split,
                                                    bool include_clean, bool include_augmented,
                                                    const Vec2& center) {
  std::vector<RegressionSample> out;
  for (const flex::FlexSample& s : ds.samples) {
    if (s.split != split) continue;
    if (s.augmented && !include_augmented) continue;
    if (!s.augmented && !include_clean) continue;
    out.push_back({curve_nodes(s.curve, center), s.label_f});
  }
  return out;
}

FlexEstimator FlexEstimator::make_gnn(int hidden, Rng& rng) {
  FlexEstimator e;
  e.backbone_ = Backbone::gnn;
  e.gnn_ = ChainGnn(hidden, rng);
  return e;
}

FlexEstimator FlexEstimator::make_mlp(int curve_points, const std::vector<int>& hidden, Rng& rng) {
  FlexEstimator e;
  e.backbone_ = Backbone::mlp;
  std::vector<int> widths{2 * curve_points};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  std::vector<Activation> acts(widths.size() - 1, Activation::tanh_act);
  acts.back() = Activation::identity;
  e.mlp_ = DenseNet(widths, acts, rng);
  return e;
}

double FlexEstimator::predict(const flex::ProjectedCurve& curve) const {
  const Eigen::MatrixXd nodes = curve_nodes(curve, center_);
  return backbone_ == Backbone::gnn ? nn::predict(gnn_, nodes) : nn::predict(mlp_, nodes);
}

TrainReport FlexEstimator::train(const flex::FlexDataset& ds, const TrainOptions& opts,
                                 bool include_augmented) {
  center_ = ds.meta.grasp_proj;
  const auto train_set =
      to_regression_samples(ds, flex::Split::train, true, include_augmented, center_);
  const auto val_set = to_regression_samples(ds, flex::Split::val, true, true, center_);
  if (backbone_ == Backbone::gnn) return train_regressor(gnn_, train_set, val_set, opts);
  return train_regressor(mlp_, train_set, val_set, opts);
}

void FlexEstimator::save(const std::string& path) const {
  json j{{"format", "dloflex-estimator-v1"},
         {"backbone", backbone_ == Backbone::gnn ? "gnn" : "mlp"},
         {"center", {center_.x(), center_.y()}},
         {"net", backbone_ == Backbone::gnn ? detail::gnn_to_json(gnn_) : detail::dense_to_json(mlp_)}};
  detail::write_text_file(path, j.dump(2) + "\n");
}

FlexEstimator FlexEstimator::load(const std::string& path) {
  const json j = json::parse(detail::read_text_file(path));
  if (j.at("format").get<std::string>() != "dloflex-estimator-v1")
    throw ValidationError("not an estimator checkpoint: " + path);
  FlexEstimator e;
  e.center_ = Vec2(j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>());
  if (j.at("backbone").get<std::string>() == "gnn") {
    e.backbone_ = Backbone::gnn;
    e.gnn_ = detail::gnn_from_json(j.at("net"));
  } else {
    e.backbone_ = Backbone::mlp;
    e.mlp_ = detail::dense_from_json(j.at("net"));
  }
  return e;
}

}  // namespace dlo::nn
