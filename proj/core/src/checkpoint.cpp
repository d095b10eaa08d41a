#include "dlo/nn/checkpoint.hpp"

#include "json_io.hpp"

namespace dlo::nn {

using nlohmann::json;

namespace detail {

namespace {

json params_json(std::vector<Param> params) {
  json out = json::object();
  for (const Param& p : params) {
    json data = json::array();
    for (int i = 0; i < p.size(); ++i) data.push_back(p.data[i]);
    out[p.name] = json{{"shape", {p.rows, p.cols}}, {"data", std::move(data)}};
  }
  return out;
}

void load_params(std::vector<Param> params, const json& j) {
  for (Param& p : params) {
    if (!j.contains(p.name)) throw ValidationError("checkpoint missing parameter: " + p.name);
    const json& entry = j.at(p.name);
    const auto shape = entry.at("shape").get<std::vector<int>>();
    if (shape.size() != 2 || shape[0] != p.rows || shape[1] != p.cols)
      throw ValidationError("checkpoint shape mismatch for: " + p.name);
    const auto data = entry.at("data").get<std::vector<double>>();
    if (static_cast<int>(data.size()) != p.size())
      throw ValidationError("checkpoint size mismatch for: " + p.name);
    for (int i = 0; i < p.size(); ++i) p.data[i] = data[i];
  }
}

}  // namespace

json dense_to_json(const DenseNet& net) {
  json acts = json::array();
  for (Activation a : net.activations()) acts.push_back(to_string(a));
  return json{{"format", "dloflex-net-v1"},
              {"kind", "dense"},
              {"widths", net.widths()},
              {"activations", acts},
              {"params", params_json(const_cast<DenseNet&>(net).params())}};
}

DenseNet dense_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "dense")
    throw ValidationError("checkpoint is not a dense net");
  const auto widths = j.at("widths").get<std::vector<int>>();
  std::vector<Activation> acts;
  for (const auto& a : j.at("activations")) acts.push_back(activation_from_string(a));
  Rng rng(0);
  DenseNet net(widths, acts, rng);
  load_params(net.params(), j.at("params"));
  return net;
}

json gnn_to_json(const ChainGnn& net) {
  return json{{"format", "dloflex-net-v1"},
              {"kind", "chain_gnn"},
              {"hidden", net.hidden()},
              {"params", params_json(const_cast<ChainGnn&>(net).params())}};
}

ChainGnn gnn_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "chain_gnn")
    throw ValidationError("checkpoint is not a chain gnn");
  Rng rng(0);
  ChainGnn net(j.at("hidden").get<int>(), rng);
  load_params(net.params(), j.at("params"));
  return net;
}

}  // namespace detail

std::string dense_to_json_string(const DenseNet& net) { return detail::dense_to_json(net).dump(); }

DenseNet dense_from_json_string(const std::string& text) {
  return detail::dense_from_json(json::parse(text));
}

std::string gnn_to_json_string(const ChainGnn& net) { return detail::gnn_to_json(net).dump(); }

ChainGnn gnn_from_json_string(const std::string& text) {
  return detail::gnn_from_json(json::parse(text));
}

void save_dense(const DenseNet& net, const std::string& path) {
  detail::write_text_file(path, detail::dense_to_json(net).dump(2) + "\n");
}

DenseNet load_dense(const std::string& path) {
  return detail::dense_from_json(json::parse(detail::read_text_file(path)));
}

void save_gnn(const ChainGnn& net, const std::string& path) {
  detail::write_text_file(path, detail::gnn_to_json(net).dump(2) + "\n");
}

ChainGnn load_gnn(const std::string& path) {
  return detail::gnn_from_json(json::parse(detail::read_text_file(path)));
}

}  // namespace dlo::nn
