#pragma once

#include <string>

#include "dlo/nn/dense.hpp"
#include "dlo/nn/gnn.hpp"

namespace dlo::nn {

/// JSON checkpoints: named parameter arrays with shapes, plus the
/// architecture needed to rebuild the model. Text in, text out, so callers
/// never need the JSON library.
std::string dense_to_json_string(const DenseNet& net);
DenseNet dense_from_json_string(const std::string& text);
std::string gnn_to_json_string(const ChainGnn& net);
ChainGnn gnn_from_json_string(const std::string& text);

void save_dense(const DenseNet& net, const std::string& path);
DenseNet load_dense(const std::string& path);
void save_gnn(const ChainGnn& net, const std::string& path);
ChainGnn load_gnn(const std::string& path);

}  // namespace dlo::nn
