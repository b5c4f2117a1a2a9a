// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/episodes/dump.hpp"

#include <stdexcept>

namespace metagraph::episodes {

using graph::Edge;
using graph::Graph;
using nlohmann::json;

namespace {

json edges_json(const std::vector<Edge>& edges) {
  json a = json::array();
  for (const Edge& e : edges) a.push_back({e.u, e.v});
  return a;
}

std::vector<Edge> edges_from(const json& a) {
  std::vector<Edge> out;
  for (const auto& e : a) out.push_back(Edge{e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
  return out;
}

json view_json(const Graph& g) {
  json j{{"graph_id", g.id}, {"num_nodes", g.num_nodes}, {"edges", edges_json(g.edges)}};
  if (g.graph_label) j["graph_label"] = *g.graph_label;
  if (g.has_node_labels()) j["node_labels"] = g.node_labels;
  if (g.labelled_nodes) j["labelled_nodes"] = *g.labelled_nodes;
  if (g.positive_edges) j["positive_edges"] = edges_json(*g.positive_edges);
  if (g.negative_edges) j["negative_edges"] = edges_json(*g.negative_edges);
  return j;
}

Graph view_from(const json& j) {
  Graph g;
  g.id = j.at("graph_id").get<std::size_t>();
  g.num_nodes = j.at("num_nodes").get<std::size_t>();
  g.edges = edges_from(j.at("edges"));
  g.node_features = ad::Tensor(g.num_nodes, 0);
  if (j.contains("graph_label")) g.graph_label = j["graph_label"].get<int>();
  if (j.contains("node_labels")) g.node_labels = j["node_labels"].get<std::vector<int>>();
  if (j.contains("labelled_nodes")) g.labelled_nodes = j["labelled_nodes"].get<std::vector<std::size_t>>();
  if (j.contains("positive_edges")) g.positive_edges = edges_from(j["positive_edges"]);
  if (j.contains("negative_edges")) g.negative_edges = edges_from(j["negative_edges"]);
  return g;
}

}  // namespace

json episode_to_json(const MultiTaskEpisode& episode) {
  json tasks = json::array();
  for (const TaskData& t : episode.tasks) {
    json support = json::array();
    json target = json::array();
    for (const Graph& g : t.support) support.push_back(view_json(g));
    for (const Graph& g : t.target) target.push_back(view_json(g));
    tasks.push_back({{"task", task_name(t.kind)}, {"support", support}, {"target", target}});
  }
  json lambdas = json::object();
  for (TaskKind k : kAllTasks) lambdas[std::string(task_name(k))] = episode.lambdas[k];
  return json{{"episode_id", episode.id},
              {"concurrent", episode.concurrent},
              {"lambdas", lambdas},
              {"tasks", tasks}};
}

MultiTaskEpisode episode_from_json(const json& j) {
  MultiTaskEpisode ep;
  ep.id = j.at("episode_id").get<std::uint64_t>();
  ep.concurrent = j.value("concurrent", false);
  for (TaskKind k : kAllTasks) ep.lambdas[k] = j.at("lambdas").at(std::string(task_name(k))).get<double>();
  for (const auto& t : j.at("tasks")) {
    const auto kind = parse_task(t.at("task").get<std::string>());
    if (!kind) throw std::runtime_error("episode dump: unknown task '" + t.at("task").get<std::string>() + "'");
    TaskData data{*kind, {}, {}};
    for (const auto& g : t.at("support")) data.support.push_back(view_from(g));
    for (const auto& g : t.at("target")) data.target.push_back(view_from(g));
    ep.tasks.push_back(std::move(data));
  }
  return ep;
}

}  // namespace metagraph::episodes
