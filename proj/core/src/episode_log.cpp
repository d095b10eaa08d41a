#include "dlo/env/episode_log.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace dlo::env {

using nlohmann::json;

EpisodeLogWriter::EpisodeLogWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open episode log for writing: " + path);
}

void EpisodeLogWriter::write(const EpisodeRecord& rec) {
  json action = json::array();
  for (Eigen::Index i = 0; i < rec.action.size(); ++i) action.push_back(rec.action[i]);
  const json line{{"seed", rec.seed},
                  {"sweep_param", rec.sweep_param},
                  {"f", rec.f},
                  {"theta", rec.theta},
                  {"radius", rec.radius},
                  {"action", std::move(action)},
                  {"rope_in", rec.rope_in},
                  {"rope_out", rec.rope_out},
                  {"reward", rec.reward},
                  {"signed_endpoint_distance", rec.signed_endpoint_distance},
                  {"success", rec.success}};
  out_ << line.dump() << "\n";
}

std::vector<EpisodeRecord> read_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open episode log: " + path);
  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    EpisodeRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.sweep_param = j.at("sweep_param").get<double>();
    r.f = j.at("f").get<double>();
    r.theta = j.at("theta").get<double>();
    r.radius = j.at("radius").get<double>();
    const auto& a = j.at("action");
    r.action.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.action[i] = a.at(i).get<double>();
    r.rope_in = j.at("rope_in").get<bool>();
    r.rope_out = j.at("rope_out").get<bool>();
    r.reward = j.at("reward").get<double>();
    r.signed_endpoint_distance = j.at("signed_endpoint_distance").get<double>();
    r.success = j.at("success").get<bool>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dlo::env
