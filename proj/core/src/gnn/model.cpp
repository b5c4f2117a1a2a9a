// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/gnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace metagraph::gnn {

using ad::Tensor;
using ad::Var;

ad::SparseEdges normalized_adjacency(std::size_t num_nodes, std::span<const graph::Edge> edges,
                                     std::size_t offset) {
  std::vector<double> degree(num_nodes, 0.0);
  for (const auto& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes || e.u == e.v) {
      throw std::invalid_argument("normalized_adjacency: invalid edge");
    }
    degree[e.u] += 1.0;
    degree[e.v] += 1.0;
  }
  std::vector<double> inv_sqrt(num_nodes);
  for (std::size_t v = 0; v < num_nodes; ++v) inv_sqrt[v] = 1.0 / std::sqrt(degree[v] + 1.0);

  ad::SparseEdges a;
  for (std::size_t v = 0; v < num_nodes; ++v) a.push(offset + v, offset + v, inv_sqrt[v] * inv_sqrt[v]);
  for (const auto& e : edges) {
    const double c = inv_sqrt[e.u] * inv_sqrt[e.v];
    a.push(offset + e.u, offset + e.v, c);
    a.push(offset + e.v, offset + e.u, c);
  }
  return a;
}

GraphBatch GraphBatch::build(std::span<const graph::Graph* const> graphs, std::size_t feature_dim) {
  GraphBatch b;
  b.offsets.push_back(0);
  for (const graph::Graph* g : graphs) {
    if (g->num_nodes == 0) {
      throw std::invalid_argument("graph " + std::to_string(g->id) + " has no nodes");
    }
    if (g->feature_dim() != feature_dim) {
      throw std::invalid_argument("graph " + std::to_string(g->id) + ": feature_dim " +
                                  std::to_string(g->feature_dim()) + " != " +
                                  std::to_string(feature_dim));
    }
    b.num_nodes += g->num_nodes;
    b.offsets.push_back(b.num_nodes);
  }
  b.features = Tensor(b.num_nodes, feature_dim);
  b.node_graph.resize(b.num_nodes);
  auto adjacency = std::make_shared<ad::SparseEdges>();
  auto pooling = std::make_shared<ad::SparseEdges>();
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const graph::Graph& g = *graphs[gi];
    const std::size_t off = b.offsets[gi];
    std::copy(g.node_features.values().begin(), g.node_features.values().end(),
              b.features.values().begin() + static_cast<std::ptrdiff_t>(off * feature_dim));
    const double share = 1.0 / static_cast<double>(g.num_nodes);
    for (std::size_t v = 0; v < g.num_nodes; ++v) {
      b.node_graph[off + v] = gi;
      pooling->push(gi, off + v, share);
    }
    ad::SparseEdges a = normalized_adjacency(g.num_nodes, g.edges, off);
    adjacency->dst.insert(adjacency->dst.end(), a.dst.begin(), a.dst.end());
    adjacency->src.insert(adjacency->src.end(), a.src.begin(), a.src.end());
    adjacency->coeff.insert(adjacency->coeff.end(), a.coeff.begin(), a.coeff.end());
  }
  b.adjacency = std::move(adjacency);
  b.pooling = std::move(pooling);
  return b;
}

GraphBatch GraphBatch::build(const std::vector<graph::Graph>& graphs, std::size_t feature_dim) {
  std::vector<const graph::Graph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const auto& g : graphs) ptrs.push_back(&g);
  return build(ptrs, feature_dim);
}

Var gcn_layer(const Var& h, std::shared_ptr<const ad::SparseEdges> adjacency, const Var& w,
              bool use_residual, bool unit_norm) {
  const std::size_t n = h.shape().rows;
  if (w.shape().rows != h.shape().cols) {
    throw ad::ShapeError("gcn_layer: H " + h.shape().str() + " vs W " + w.shape().str());
  }
  // aggregate first: cheaper whenever the input is narrower than the output
  Var z = ad::relu(ad::matmul(ad::sparse_aggregate(h, std::move(adjacency), n), w));
  if (use_residual && h.shape() == z.shape()) z = ad::add(z, h);
  if (unit_norm) z = ad::row_l2_normalize(z);
  return z;
}

Var gcn_layer(const Var& h, const ad::SparseEdges& adjacency, const Var& w, bool use_residual,
              bool unit_norm) {
  return gcn_layer(h, std::make_shared<const ad::SparseEdges>(adjacency), w, use_residual, unit_norm);
}

std::vector<Var> encode_layers(const ParamVars& p, const GnnConfig& config, const GraphBatch& batch) {
  ad::Tape& tape = p[kGcnW1].tape();
  if (batch.num_nodes == 0) return {tape.constant(Tensor(0, config.hidden))};
  if (batch.feature_dim() != p[kGcnW1].shape().rows) {
    throw ad::ShapeError("encode: feature_dim " + std::to_string(batch.feature_dim()) +
                         " does not match layer-1 weights " + p[kGcnW1].shape().str());
  }
  std::vector<Var> out;
  Var h = tape.constant(batch.features);
  h = gcn_layer(h, batch.adjacency, p[kGcnW1], false, config.unit_norm);
  out.push_back(h);
  h = gcn_layer(h, batch.adjacency, p[kGcnW2], config.residual, config.unit_norm);
  out.push_back(h);
  h = gcn_layer(h, batch.adjacency, p[kGcnW3], config.residual, false);
  out.push_back(h);
  return out;
}

Var encode(const ParamVars& p, const GnnConfig& config, const GraphBatch& batch) {
  return encode_layers(p, config, batch).back();
}

Var nc_logits(const Var& h, const ParamVars& p) {
  return ad::add(ad::matmul(h, p[kNcW]), p[kNcB]);
}

Var head_nc(const Var& h, const ParamVars& p) { return ad::row_softmax(nc_logits(h, p)); }

Var gc_logits(const Var& h, const GraphBatch& batch, const ParamVars& p) {
  if (h.shape().rows != batch.num_nodes) {
    throw ad::ShapeError("gc_logits: embedding rows " + std::to_string(h.shape().rows) +
                         " != batch nodes " + std::to_string(batch.num_nodes));
  }
  Var t = ad::relu(ad::add(ad::matmul(h, p[kGcW1]), p[kGcB1]));
  Var pooled = ad::sparse_aggregate(t, batch.pooling, batch.num_graphs());
  return ad::add(ad::matmul(pooled, p[kGcW2]), p[kGcB2]);
}

Var head_gc(const Var& h, const GraphBatch& batch, const ParamVars& p) {
  return ad::row_softmax(gc_logits(h, batch, p));
}

Var lp_logits(const Var& h, std::span<const graph::Edge> pairs, const ParamVars& p) {
  const std::size_t n = h.shape().rows;
  std::vector<std::size_t> us, vs;
  us.reserve(pairs.size());
  vs.reserve(pairs.size());
  for (const auto& e : pairs) {
    if (e.u >= n || e.v >= n) {
      throw std::out_of_range("lp_logits: pair (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") outside " + std::to_string(n) + " nodes");
    }
    us.push_back(e.u);
    vs.push_back(e.v);
  }
  Var t = ad::relu(ad::add(ad::matmul(h, p[kLpW1]), p[kLpB1]));
  Var joined = ad::concat_cols(ad::gather_rows(t, us), ad::gather_rows(t, vs));
  return ad::add(ad::matmul(joined, p[kLpW2]), p[kLpB2]);
}

Var head_lp(const Var& h, std::span<const graph::Edge> pairs, const ParamVars& p) {
  return ad::sigmoid(lp_logits(h, pairs, p));
}

Var cross_entropy_with_logits(const Var& logits, std::span<const int> labels) {
  const auto [n, c] = logits.shape();
  if (labels.empty()) throw std::invalid_argument("cross_entropy: empty label set");
  if (labels.size() != n) {
    throw std::invalid_argument("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(n) + " rows");
  }
  Tensor one_hot(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      throw std::out_of_range("cross_entropy: label out of range");
    }
    one_hot(i, static_cast<std::size_t>(labels[i])) = 1.0;
  }
  Var picked = ad::mul(ad::row_log_softmax(logits), logits.tape().constant(std::move(one_hot)));
  return ad::scale(ad::sum(picked), -1.0 / static_cast<double>(n));
}

Var binary_cross_entropy_with_logits(const Var& logits, std::span<const int> labels) {
  const std::size_t n = logits.shape().rows;
  if (labels.empty()) throw std::invalid_argument("binary_cross_entropy: empty label set");
  if (logits.shape().cols != 1 || labels.size() != n) {
    throw std::invalid_argument("binary_cross_entropy: expected " + std::to_string(labels.size()) +
                                "x1 logits, got " + logits.shape().str());
  }
  Tensor pos(n, 1), neg(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw std::out_of_range("binary_cross_entropy: label not 0/1");
    (labels[i] == 1 ? pos : neg)[i] = 1.0;
  }
  ad::Tape& tape = logits.tape();
  Var ll = ad::add(ad::mul(ad::log_sigmoid(logits), tape.constant(std::move(pos))),
                   ad::mul(ad::log_sigmoid(ad::scale(logits, -1.0)), tape.constant(std::move(neg))));
  return ad::scale(ad::sum(ll), -1.0 / static_cast<double>(n));
}

namespace {

double clamped_log(double p) {
  return std::log(std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp));
}

}  // namespace

double cross_entropy(const Tensor& probabilities, std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("cross_entropy: empty label set");
  if (labels.size() != probabilities.rows()) throw std::invalid_argument("cross_entropy: label count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= probabilities.cols()) {
      throw std::out_of_range("cross_entropy: label out of range");
    }
    total -= clamped_log(probabilities(i, static_cast<std::size_t>(labels[i])));
  }
  return total / static_cast<double>(labels.size());
}

double binary_cross_entropy(const Tensor& probabilities, std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("binary_cross_entropy: empty label set");
  if (labels.size() != probabilities.size()) {
    throw std::invalid_argument("binary_cross_entropy: label count mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = probabilities[i];
    total -= labels[i] == 1 ? clamped_log(p) : clamped_log(1.0 - p);
  }
  return total / static_cast<double>(labels.size());
}

}  // namespace metagraph::gnn
