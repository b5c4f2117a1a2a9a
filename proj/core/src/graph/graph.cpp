// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/graph/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace metagraph::graph {
namespace {

std::string edge_str(const Edge& e) {
  return "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")";
}

}  // namespace

std::vector<std::string> check_graph(const Graph& g) {
  std::vector<std::string> out;
  const std::string where = "graph " + std::to_string(g.id) + ": ";
  std::set<Edge> edge_set;
  for (const Edge& e : g.edges) {
    if (e.u >= g.num_nodes || e.v >= g.num_nodes) {
      out.push_back(where + "edge " + edge_str(e) + " references a missing node");
    }
    if (e.u == e.v) out.push_back(where + "self-loop " + edge_str(e) + " in edge list");
    edge_set.insert(e.canonical());
  }
  if (g.node_features.rows() != g.num_nodes) {
    out.push_back(where + "feature rows " + std::to_string(g.node_features.rows()) +
                  " != num_nodes " + std::to_string(g.num_nodes));
  }
  if (g.has_node_labels() && g.node_labels.size() != g.num_nodes) {
    out.push_back(where + "node label count does not match num_nodes");
  }
  if (g.labelled_nodes) {
    for (std::size_t v : *g.labelled_nodes) {
      if (v >= g.num_nodes) out.push_back(where + "labelled node " + std::to_string(v) + " out of range");
    }
  }
  if (g.negative_edges) {
    for (const Edge& e : *g.negative_edges) {
      if (edge_set.count(e.canonical())) {
        out.push_back(where + "negative is a real edge " + edge_str(e));
      }
    }
  }
  return out;
}

std::size_t distinct_node_labels(const Graph& g) {
  std::set<int> s(g.node_labels.begin(), g.node_labels.end());
  return s.size();
}

void validate_dataset(const Dataset& d) {
  std::vector<std::string> problems;
  for (const Graph& g : d.graphs) {
    for (auto& p : check_graph(g)) problems.push_back(std::move(p));
    if (g.feature_dim() != d.feature_dim) {
      problems.push_back("graph " + std::to_string(g.id) + ": feature_dim " +
                         std::to_string(g.feature_dim()) + " != dataset " +
                         std::to_string(d.feature_dim));
    }
    if (g.graph_label && (*g.graph_label < 0 || *g.graph_label >= d.num_graph_classes)) {
      problems.push_back("graph " + std::to_string(g.id) + ": graph label out of range");
    }
    for (int l : g.node_labels) {
      if (l < 0 || l >= d.num_node_classes) {
        problems.push_back("graph " + std::to_string(g.id) + ": node label out of range");
        break;
      }
    }
  }
  if (problems.empty()) return;
  std::string msg = "dataset '" + d.name + "' is invalid:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw std::invalid_argument(msg);
}

}  // namespace metagraph::graph
