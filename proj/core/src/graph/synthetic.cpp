// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/graph/synthetic.hpp"

#include <stdexcept>

#include "metagraph/random.hpp"

namespace metagraph::graph {
namespace {

constexpr double kBaseEdgeProbability = 0.1;
constexpr double kFeatureSignal = 2.0;

}  // namespace

Dataset synth_dataset(const SynthSpec& spec, std::uint64_t seed) {
  if (spec.num_graph_classes < 1 || spec.num_node_classes < 1) {
    throw std::invalid_argument("synth_dataset: class counts must be positive");
  }
  if (spec.num_graphs == 0) throw std::invalid_argument("synth_dataset: num_graphs must be positive");
  if (spec.min_nodes < 1 || spec.min_nodes > spec.max_nodes) {
    throw std::invalid_argument("synth_dataset: need 1 <= min_nodes <= max_nodes");
  }
  if (spec.feature_dim == 0) throw std::invalid_argument("synth_dataset: feature_dim must be positive");
  if (!(spec.strength >= 0.0 && spec.strength <= 1.0)) {
    throw std::invalid_argument("synth_dataset: strength must lie in [0, 1]");
  }

  Rng rng(derive_seed(seed, {0x73796e7468}));
  const double s = spec.strength;
  const auto cg = static_cast<std::size_t>(spec.num_graph_classes);
  const auto cn = static_cast<std::size_t>(spec.num_node_classes);

  // balanced graph labels in random order
  std::vector<int> labels(spec.num_graphs);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % cg);
  shuffle(labels, rng);

  Dataset d;
  d.name = "synthetic";
  d.num_graph_classes = spec.num_graph_classes;
  d.num_node_classes = spec.num_node_classes;
  d.feature_dim = spec.feature_dim;
  d.graphs.resize(spec.num_graphs);

  for (std::size_t gi = 0; gi < spec.num_graphs; ++gi) {
    Graph& g = d.graphs[gi];
    const int label = labels[gi];
    g.id = gi;
    g.graph_label = label;
    g.num_nodes = spec.min_nodes + uniform_index(rng, spec.max_nodes - spec.min_nodes + 1);
    g.node_labels.resize(g.num_nodes);
    for (int& l : g.node_labels) l = static_cast<int>(uniform_index(rng, cn));

    const double density = cg > 1 ? static_cast<double>(label) / static_cast<double>(cg - 1) : 0.0;
    const double p_same = kBaseEdgeProbability + s * (0.3 + 0.4 * density);
    for (std::size_t u = 0; u < g.num_nodes; ++u) {
      for (std::size_t v = u + 1; v < g.num_nodes; ++v) {
        const double p = g.node_labels[u] == g.node_labels[v] ? p_same : kBaseEdgeProbability;
        if (uniform01(rng) < p) g.edges.push_back(Edge{u, v});
      }
    }

    g.node_features = ad::Tensor(g.num_nodes, spec.feature_dim);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
      auto row = g.node_features.row(v);
      for (double& x : row) x = standard_normal(rng);
      const auto node_dim = static_cast<std::size_t>(g.node_labels[v]) % spec.feature_dim;
      row[node_dim] += kFeatureSignal * s;
      const auto graph_dim = (cn + static_cast<std::size_t>(label)) % spec.feature_dim;
      row[graph_dim] += kFeatureSignal * s;
    }
  }
  validate_dataset(d);
  return d;
}

}  // namespace metagraph::graph
