#include <benchmark/benchmark.h>

#include "dlo/nn/train.hpp"
#include "dlo/rng.hpp"

using namespace dlo;

static void BM_DenseForwardBackward(benchmark::State& state) {
  Rng rng(1);
  const int batch = static_cast<int>(state.range(0));
  nn::DenseNet net({130, 128, 128, 1},
                   {nn::Activation::tanh_act, nn::Activation::tanh_act, nn::Activation::identity},
                   rng);
  Eigen::MatrixXd x(batch, 130);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
  const Eigen::MatrixXd gout = Eigen::MatrixXd::Ones(batch, 1);
  for (auto _ : state) {
    nn::DenseNet::Cache cache;
    net.forward(x, cache);
    nn::DenseNet::Grads grads = net.backward(cache, gout);
    benchmark::DoNotOptimize(grads.w[0](0, 0));
  }
}
BENCHMARK(BM_DenseForwardBackward)->Arg(1)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_GnnForwardBackward(benchmark::State& state) {
  Rng rng(2);
  nn::ChainGnn gnn(32, rng);
  Eigen::MatrixXd nodes(20, 2);
  for (int i = 0; i < nodes.size(); ++i) nodes.data()[i] = rng.uniform(-0.3, 0.3);
  for (auto _ : state) {
    nn::ChainGnn::Cache cache;
    gnn.forward(nodes, cache);
    nn::ChainGnn::Grads grads = gnn.backward(cache, 1.0);
    benchmark::DoNotOptimize(grads.embed_w(0, 0));
  }
}
BENCHMARK(BM_GnnForwardBackward)->Unit(benchmark::kMicrosecond);
