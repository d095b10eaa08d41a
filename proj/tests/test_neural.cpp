#include <doctest.h>

#include <cmath>

#include "dlo/nn/checkpoint.hpp"
#include "dlo/nn/estimator.hpp"
#include "dlo/nn/train.hpp"
#include "support/oracles.hpp"

using namespace dlo;
using namespace dlo::nn;

namespace {

Eigen::MatrixXd random_nodes(int n, Rng& rng) {
  Eigen::MatrixXd m(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = rng.uniform(-0.3, 0.3);
  return m;
}

std::vector<double> collect(const std::vector<Param>& views) {
  std::vector<double> flat;
  for (const Param& p : views)
    for (int i = 0; i < p.size(); ++i) flat.push_back(p.data[i]);
  return flat;
}

}  // namespace

TEST_SUITE("neural") {

TEST_CASE("dense forward basics") {
  Rng rng(1);
  DenseNet zero({3, 2}, {Activation::identity}, rng);
  zero.weight(0).setZero();
  zero.bias(0).setZero();
  Eigen::MatrixXd x(1, 3);
  x << 1.0, -2.0, 0.5;
  CHECK(zero.forward(x).cwiseAbs().maxCoeff() == 0.0);

  DenseNet affine({1, 1}, {Activation::identity}, rng);
  affine.weight(0)(0, 0) = 2.0;
  affine.bias(0)(0) = 1.0;
  Eigen::MatrixXd three(1, 1);
  three << 3.0;
  CHECK(affine.forward(three)(0, 0) == doctest::Approx(7.0).epsilon(1e-15));

  DenseNet net({4, 8, 1}, {Activation::tanh_act, Activation::identity}, rng);
  Eigen::MatrixXd in(2, 4);
  in << 0.1, 0.2, 0.3, 0.4, -0.5, 0.25, 0.0, 1.0;
  CHECK(net.forward(in) == net.forward(in));  // pure
}

TEST_CASE("dense backward matches central finite differences") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    DenseNet net({5, 7, 6, 2},
                 {Activation::tanh_act, Activation::relu, Activation::identity}, rng);
    Eigen::MatrixXd x(3, 5);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
    Eigen::MatrixXd gout(3, 2);
    for (int i = 0; i < gout.size(); ++i) gout.data()[i] = rng.uniform(-1, 1);

    auto loss = [&]() { return net.forward(x).cwiseProduct(gout).sum(); };

    DenseNet::Cache cache;
    net.forward(x, cache);
    DenseNet::Grads grads = net.backward(cache, gout);
    auto gview = DenseNet::grad_views(grads);
    const std::vector<double> analytic = collect(gview);

    std::vector<double> numeric;
    for (const Param& p : net.params()) {
      const std::vector<double> g = dlo::testing::finite_diff(loss, p.data, p.size());
      numeric.insert(numeric.end(), g.begin(), g.end());
    }
    CHECK(dlo::testing::max_rel_error(analytic, numeric) < 1e-5);
  }
}

TEST_CASE("dense input gradient for a single identity layer") {
  Rng rng(2);
  DenseNet net({3, 2}, {Activation::identity}, rng);
  Eigen::MatrixXd x(1, 3);
  x << 0.4, -0.2, 0.9;
  DenseNet::Cache cache;
  net.forward(x, cache);
  Eigen::MatrixXd g(1, 2);
  g << 1.5, -0.5;
  const DenseNet::Grads grads = net.backward(cache, g);
  const Eigen::MatrixXd expected = g * net.weight(0);
  CHECK((grads.input - expected).cwiseAbs().maxCoeff() < 1e-14);

  const DenseNet::Grads zeroed = net.backward(cache, Eigen::MatrixXd::Zero(1, 2));
  CHECK(zeroed.w[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(zeroed.input.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense backward rejects foreign caches") {
  Rng rng(3);
  DenseNet a({2, 2}, {Activation::identity}, rng);
  DenseNet b({2, 2}, {Activation::identity}, rng);
  Eigen::MatrixXd x(1, 2);
  x << 1, 2;
  DenseNet::Cache cache;
  a.forward(x, cache);
  CHECK_THROWS_AS(b.backward(cache, x), ValidationError);
}

TEST_CASE("gnn is symmetric under chain reversal of a palindromic curve") {
  Rng rng(4);
  ChainGnn gnn(16, rng);
  Eigen::MatrixXd nodes(5, 2);
  nodes << 0.0, 0.0, 0.1, 0.2, 0.2, 0.3, 0.1, 0.2, 0.0, 0.0;
  Eigen::MatrixXd reversed = nodes.colwise().reverse();
  CHECK(gnn.forward(nodes) == doctest::Approx(gnn.forward(reversed)).epsilon(1e-12));
}

TEST_CASE("gnn with zero readout weights returns the readout bias") {
  Rng rng(5);
  ChainGnn gnn(8, rng);
  gnn.readout_weight().setZero();
  gnn.readout_bias() = -0.75;
  Eigen::MatrixXd nodes = random_nodes(7, rng);
  CHECK(gnn.forward(nodes) == doctest::Approx(-0.75).epsilon(1e-15));
}

TEST_CASE("gnn backward matches central finite differences") {
  Rng rng(23);
  for (int trial = 0; trial < 6; ++trial) {
    ChainGnn gnn(6, rng);
    Eigen::MatrixXd nodes = random_nodes(5 + trial, rng);
    auto loss = [&]() { return gnn.forward(nodes); };

    ChainGnn::Cache cache;
    gnn.forward(nodes, cache);
    ChainGnn::Grads grads = gnn.backward(cache, 1.0);
    auto gview = ChainGnn::grad_views(grads);
    const std::vector<double> analytic = collect(gview);

    std::vector<double> numeric;
    for (const Param& p : gnn.params()) {
      const std::vector<double> g = dlo::testing::finite_diff(loss, p.data, p.size());
      numeric.insert(numeric.end(), g.begin(), g.end());
    }
    CHECK(dlo::testing::max_rel_error(analytic, numeric) < 1e-5);

    // node-feature gradient too
    std::vector<double> node_numeric =
        dlo::testing::finite_diff(loss, nodes.data(), static_cast<int>(nodes.size()));
    std::vector<double> node_analytic(grads.nodes.data(),
                                      grads.nodes.data() + grads.nodes.size());
    CHECK(dlo::testing::max_rel_error(node_analytic, node_numeric) < 1e-5);
  }
}

TEST_CASE("adam with zero learning rate leaves parameters unchanged") {
  Rng rng(6);
  DenseNet net({3, 4, 1}, {Activation::tanh_act, Activation::identity}, rng);
  const std::vector<double> before = collect(net.params());
  Adam adam({0.0, 0.9, 0.999, 1e-8});
  adam.init(net.params());
  DenseNet::Grads g = net.zero_grads();
  for (auto& w : g.w) w.setConstant(1.0);
  auto gv = DenseNet::grad_views(g);
  adam.step(net.params(), gv);
  CHECK(collect(net.params()) == before);
}

TEST_CASE("train_regressor learns a constant and is deterministic") {
  std::vector<RegressionSample> train, val;
  Rng data_rng(8);
  for (int i = 0; i < 32; ++i) train.push_back({random_nodes(6, data_rng), 3.25});

  TrainOptions opts;
  opts.epochs = 40;
  opts.batch = 8;
  opts.seed = 99;

  Rng rng_a(10);
  DenseNet a({12, 8, 1}, {Activation::tanh_act, Activation::identity}, rng_a);
  const TrainReport ra = train_regressor(a, train, val, opts);
  CHECK(ra.train_mse.back() < 1e-6);

  Rng rng_b(10);
  DenseNet b({12, 8, 1}, {Activation::tanh_act, Activation::identity}, rng_b);
  const TrainReport rb = train_regressor(b, train, val, opts);
  CHECK(ra.train_mse == rb.train_mse);

  Rng rng_c(10);
  DenseNet c({12, 8, 1}, {Activation::tanh_act, Activation::identity}, rng_c);
  opts.epochs = 0;
  const std::vector<double> before = collect(c.params());
  train_regressor(c, train, val, opts);
  CHECK(collect(c.params()) == before);
}

TEST_CASE("gnn regressor fits a constant") {
  std::vector<RegressionSample> train;
  Rng data_rng(12);
  for (int i = 0; i < 24; ++i) train.push_back({random_nodes(6, data_rng), -1.5});
  Rng rng(13);
  ChainGnn gnn(8, rng);
  TrainOptions opts;
  opts.epochs = 60;
  opts.batch = 8;
  opts.seed = 7;
  const TrainReport rep = train_regressor(gnn, train, {}, opts);
  CHECK(rep.train_mse.back() < 1e-6);
  CHECK(std::isnan(rep.val_mse.back()));
}

TEST_CASE("checkpoints round-trip") {
  Rng rng(14);
  DenseNet net({4, 6, 1}, {Activation::relu, Activation::identity}, rng);
  const std::string text = dense_to_json_string(net);
  DenseNet back = dense_from_json_string(text);
  Eigen::MatrixXd x(1, 4);
  x << 0.3, -0.1, 0.8, 0.05;
  CHECK(net.forward(x)(0, 0) == back.forward(x)(0, 0));

  ChainGnn gnn(5, rng);
  ChainGnn gback = gnn_from_json_string(gnn_to_json_string(gnn));
  Eigen::MatrixXd nodes = random_nodes(6, rng);
  CHECK(gnn.forward(nodes) == gback.forward(nodes));
}

TEST_CASE("estimator wraps centering and survives save/load") {
  Rng rng(15);
  FlexEstimator est = FlexEstimator::make_gnn(8, rng);
  est.set_center(Vec2(0.25, -0.5));
  flex::ProjectedCurve curve;
  for (int i = 0; i < 6; ++i) curve.points.emplace_back(0.25 + 0.01 * i, -0.5 + 0.002 * i * i);
  const double before = est.predict(curve);
  est.save("est_test.json");
  const FlexEstimator loaded = FlexEstimator::load("est_test.json");
  CHECK(loaded.predict(curve) == before);
  std::remove("est_test.json");
}

}  // TEST_SUITE
