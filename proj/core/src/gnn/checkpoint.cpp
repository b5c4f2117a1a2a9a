// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/gnn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace metagraph::gnn {

using nlohmann::json;

json config_to_json(const GnnConfig& c) {
  return json{{"feature_dim", c.feature_dim},
              {"hidden", c.hidden},
              {"num_node_classes", c.num_node_classes},
              {"num_graph_classes", c.num_graph_classes},
              {"unit_norm", c.unit_norm},
              {"residual", c.residual}};
}

GnnConfig config_from_json(const json& j) {
  GnnConfig c;
  c.feature_dim = j.at("feature_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.num_node_classes = j.at("num_node_classes").get<int>();
  c.num_graph_classes = j.at("num_graph_classes").get<int>();
  c.unit_norm = j.at("unit_norm").get<bool>();
  c.residual = j.at("residual").get<bool>();
  return c;
}

json checkpoint_to_json(const Checkpoint& c) {
  json params = json::array();
  for (std::size_t id = 0; id < kNumParams; ++id) {
    const ad::Tensor& t = c.params[id];
    params.push_back({{"name", param_name(id)},
                      {"part", part_name(part_of(id))},
                      {"shape", {t.rows(), t.cols()}},
                      {"values", std::vector<double>(t.values().begin(), t.values().end())}});
  }
  return json{{"format", kCheckpointFormat},
              {"config_hash", c.config_hash},
              {"model", config_to_json(c.params.config)},
              {"run_config", c.run_config},
              {"heads_discardable", c.heads_discardable},
              {"parameters", std::move(params)}};
}

Checkpoint checkpoint_from_json(const json& j) {
  const std::string format = j.value("format", "");
  if (format != kCheckpointFormat) {
    throw std::runtime_error("checkpoint: unsupported format tag '" + format + "'");
  }
  Checkpoint c;
  c.config_hash = j.value("config_hash", "");
  c.run_config = j.value("run_config", json::object());
  c.heads_discardable = j.value("heads_discardable", false);
  c.params.config = config_from_json(j.at("model"));
  const json& params = j.at("parameters");
  if (params.size() != kNumParams) throw std::runtime_error("checkpoint: wrong parameter count");
  for (std::size_t id = 0; id < kNumParams; ++id) {
    const json& p = params[id];
    if (p.at("name").get<std::string>() != param_name(id)) {
      throw std::runtime_error("checkpoint: expected parameter " + std::string(param_name(id)));
    }
    const auto rows = p.at("shape").at(0).get<std::size_t>();
    const auto cols = p.at("shape").at(1).get<std::size_t>();
    if (ad::Shape{rows, cols} != param_shape(c.params.config, id)) {
      throw std::runtime_error("checkpoint: parameter " + std::string(param_name(id)) +
                               " has shape " + ad::Shape{rows, cols}.str() + ", config implies " +
                               param_shape(c.params.config, id).str());
    }
    c.params[id] = ad::Tensor(rows, cols, p.at("values").get<std::vector<double>>());
  }
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error(file.string() + ": cannot write");
  out << checkpoint_to_json(c).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error(file.string() + ": cannot open");
  return checkpoint_from_json(json::parse(in));
}

}  // namespace metagraph::gnn
