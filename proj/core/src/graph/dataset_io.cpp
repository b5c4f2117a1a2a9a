// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/graph/dataset_io.hpp"

#include <fstream>
#include <stdexcept>

#include "metagraph/hash.hpp"

namespace metagraph::graph {

using nlohmann::json;

namespace {

json edges_to_json(const std::vector<Edge>& edges) {
  json a = json::array();
  for (const Edge& e : edges) a.push_back({e.u, e.v});
  return a;
}

std::vector<Edge> edges_from_json(const json& a) {
  std::vector<Edge> out;
  out.reserve(a.size());
  for (const auto& e : a) out.push_back(Edge{e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
  return out;
}

}  // namespace

json graph_to_json(const Graph& g) {
  json j;
  j["id"] = g.id;
  j["num_nodes"] = g.num_nodes;
  j["edges"] = edges_to_json(g.edges);
  j["feature_dim"] = g.node_features.cols();
  j["features"] = std::vector<double>(g.node_features.values().begin(), g.node_features.values().end());
  j["node_labels"] = g.node_labels;
  j["graph_label"] = g.graph_label ? json(*g.graph_label) : json(nullptr);
  if (g.labelled_nodes) j["labelled_nodes"] = *g.labelled_nodes;
  if (g.positive_edges) j["positive_edges"] = edges_to_json(*g.positive_edges);
  if (g.negative_edges) j["negative_edges"] = edges_to_json(*g.negative_edges);
  return j;
}

Graph graph_from_json(const json& j) {
  Graph g;
  g.id = j.at("id").get<std::size_t>();
  g.num_nodes = j.at("num_nodes").get<std::size_t>();
  g.edges = edges_from_json(j.at("edges"));
  const auto dim = j.at("feature_dim").get<std::size_t>();
  g.node_features = ad::Tensor(g.num_nodes, dim, j.at("features").get<std::vector<double>>());
  g.node_labels = j.at("node_labels").get<std::vector<int>>();
  if (!j.at("graph_label").is_null()) g.graph_label = j.at("graph_label").get<int>();
  if (j.contains("labelled_nodes")) g.labelled_nodes = j["labelled_nodes"].get<std::vector<std::size_t>>();
  if (j.contains("positive_edges")) g.positive_edges = edges_from_json(j["positive_edges"]);
  if (j.contains("negative_edges")) g.negative_edges = edges_from_json(j["negative_edges"]);
  return g;
}

json dataset_to_json(const Dataset& d) {
  json j;
  j["format"] = kDatasetFormat;
  j["name"] = d.name;
  j["num_graph_classes"] = d.num_graph_classes;
  j["num_node_classes"] = d.num_node_classes;
  j["feature_dim"] = d.feature_dim;
  json graphs = json::array();
  for (const Graph& g : d.graphs) graphs.push_back(graph_to_json(g));
  j["graphs"] = std::move(graphs);
  return j;
}

Dataset dataset_from_json(const json& j) {
  if (j.value("format", "") != kDatasetFormat) {
    throw std::runtime_error("dataset cache: unsupported format tag '" + j.value("format", "") + "'");
  }
  Dataset d;
  d.name = j.at("name").get<std::string>();
  d.num_graph_classes = j.at("num_graph_classes").get<int>();
  d.num_node_classes = j.at("num_node_classes").get<int>();
  d.feature_dim = j.at("feature_dim").get<std::size_t>();
  for (const auto& g : j.at("graphs")) d.graphs.push_back(graph_from_json(g));
  validate_dataset(d);
  return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error(file.string() + ": cannot write");
  out << dataset_to_json(d).dump() << '\n';
}

Dataset load_dataset(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error(file.string() + ": cannot open");
  return dataset_from_json(json::parse(in));
}

std::string dataset_hash(const Dataset& d) { return hex_digest(dataset_to_json(d).dump()); }

}  // namespace metagraph::graph
