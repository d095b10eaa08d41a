// Internal JSON helpers shared by the .cpp files; never installed and never
// included from public headers, so vendored nlohmann stays a private
// dependency of the library.
#pragma once

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

#include "dlo/nn/dense.hpp"
#include "dlo/nn/gnn.hpp"

namespace dlo::nn::detail {

nlohmann::json dense_to_json(const DenseNet& net);
DenseNet dense_from_json(const nlohmann::json& j);
nlohmann::json gnn_to_json(const ChainGnn& net);
ChainGnn gnn_from_json(const nlohmann::json& j);

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace dlo::nn::detail
