// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "metagraph/graph/graph.hpp"

namespace metagraph::graph {

/// Planted-community generator parameters.
///
/// Node classes are communities. With strength s, same-community pairs are
/// linked more often (denser for higher graph classes) and node features
/// carry a noisy one-hot of the node class and of the graph class. With
/// s = 0 every label is independent of structure and features.
struct SynthSpec {
  std::size_t num_graphs = 40;
  std::size_t min_nodes = 8;
  std::size_t max_nodes = 16;
  int num_graph_classes = 2;
  int num_node_classes = 3;
  std::size_t feature_dim = 8;
  double strength = 1.0;

  bool operator==(const SynthSpec&) const = default;
};

Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed);

}  // namespace metagraph::graph
