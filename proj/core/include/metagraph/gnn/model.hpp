// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0
//
// Residual GCN encoder and the NC, GC and LP heads. All functions build
// nodes on the tape of their Var arguments; node and pair indices are
// positions in the concatenated batch.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "metagraph/autodiff/ops.hpp"
#include "metagraph/gnn/params.hpp"
#include "metagraph/graph/graph.hpp"

namespace metagraph::gnn {

/// Several graphs laid out as one block-diagonal graph.
struct GraphBatch {
  std::size_t num_nodes = 0;
  ad::Tensor features;  // num_nodes x feature_dim
  std::vector<std::size_t> offsets;  // first node of each graph, plus the total
  std::vector<std::size_t> node_graph;
  /// Normalised adjacency with self-loops, both edge directions present.
  std::shared_ptr<const ad::SparseEdges> adjacency;
  /// Mean pooling: graph g receives 1/n_g from each of its nodes.
  std::shared_ptr<const ad::SparseEdges> pooling;

  std::size_t num_graphs() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t feature_dim() const { return features.cols(); }

  static GraphBatch build(std::span<const graph::Graph* const> graphs, std::size_t feature_dim);
  static GraphBatch build(const std::vector<graph::Graph>& graphs, std::size_t feature_dim);
};

/// Symmetric normalised adjacency with self-loops for an edge list.
ad::SparseEdges normalized_adjacency(std::size_t num_nodes, std::span<const graph::Edge> edges,
                                     std::size_t offset = 0);

/// relu(A_hat H W), plus H when `use_residual` and widths agree, then
/// optionally row-normalised.
ad::Var gcn_layer(const ad::Var& h, const ad::SparseEdges& adjacency, const ad::Var& w,
                  bool use_residual, bool unit_norm);
ad::Var gcn_layer(const ad::Var& h, std::shared_ptr<const ad::SparseEdges> adjacency,
                  const ad::Var& w, bool use_residual, bool unit_norm);

/// Output of each of the three layers; the last one is the embedding.
std::vector<ad::Var> encode_layers(const ParamVars& p, const GnnConfig& config,
                                   const GraphBatch& batch);
ad::Var encode(const ParamVars& p, const GnnConfig& config, const GraphBatch& batch);

/// Per-node class logits; head_nc applies the softmax.
ad::Var nc_logits(const ad::Var& h, const ParamVars& p);
ad::Var head_nc(const ad::Var& h, const ParamVars& p);

/// Per-graph class logits after transform and mean pooling.
ad::Var gc_logits(const ad::Var& h, const GraphBatch& batch, const ParamVars& p);
ad::Var head_gc(const ad::Var& h, const GraphBatch& batch, const ParamVars& p);

/// Per-pair link logit (pairs x 1) for ordered pairs (u, v).
ad::Var lp_logits(const ad::Var& h, std::span<const graph::Edge> pairs, const ParamVars& p);
ad::Var head_lp(const ad::Var& h, std::span<const graph::Edge> pairs, const ParamVars& p);

/// Probabilities are clamped to this distance from 0 and 1 before the log.
inline constexpr double kProbabilityClamp = 1e-12;

/// Mean cross-entropy of row-wise logits against class labels.
ad::Var cross_entropy_with_logits(const ad::Var& logits, std::span<const int> labels);
/// Mean binary cross-entropy of a column of logits against 0/1 labels.
ad::Var binary_cross_entropy_with_logits(const ad::Var& logits, std::span<const int> labels);

/// Value-level losses on probabilities, with clamping.
double cross_entropy(const ad::Tensor& probabilities, std::span<const int> labels);
double binary_cross_entropy(const ad::Tensor& probabilities, std::span<const int> labels);

}  // namespace metagraph::gnn
