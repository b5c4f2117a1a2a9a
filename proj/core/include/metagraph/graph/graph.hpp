// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "metagraph/autodiff/tensor.hpp"

namespace metagraph::graph {

/// Undirected node pair. Stored edges are canonical (u < v).
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;

  Edge canonical() const { return u < v ? Edge{u, v} : Edge{v, u}; }
  auto operator<=>(const Edge&) const = default;
};

/// One graph plus optional task annotations.
///
/// The edge list holds each undirected edge once and never contains
/// self-loops; both directions and self-loops are materialised only when a
/// graph is turned into a GCN batch.
struct Graph {
  /// Index of the graph in the dataset it came from.
  std::size_t id = 0;
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
  ad::Tensor node_features;  // num_nodes x feature_dim
  std::vector<int> node_labels;  // empty when absent
  std::optional<int> graph_label;

  std::optional<std::vector<std::size_t>> labelled_nodes;
  std::optional<std::vector<Edge>> positive_edges;
  std::optional<std::vector<Edge>> negative_edges;

  std::size_t feature_dim() const { return node_features.cols(); }
  bool has_node_labels() const { return !node_labels.empty(); }

  bool operator==(const Graph&) const = default;
};

/// Human-readable violations of the Graph invariants; empty when valid.
std::vector<std::string> check_graph(const Graph& g);

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  int num_graph_classes = 0;
  int num_node_classes = 0;
  std::size_t feature_dim = 0;

  bool operator==(const Dataset&) const = default;
};

/// Throws std::invalid_argument listing every violated Dataset invariant.
void validate_dataset(const Dataset& d);

/// Distinct node labels that occur in `g`.
std::size_t distinct_node_labels(const Graph& g);

}  // namespace metagraph::graph
