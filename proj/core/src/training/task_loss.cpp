// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/training/task_loss.hpp"

#include <stdexcept>
#include <string>

namespace metagraph::training {

using episodes::TaskKind;

namespace {

[[noreturn]] void missing(TaskKind kind, const graph::Graph& g, const char* what) {
  throw std::invalid_argument("task " + std::string(episodes::task_name(kind)) + ": graph " +
                              std::to_string(g.id) + " has no " + what);
}

}  // namespace

TaskView TaskView::build(TaskKind kind, const std::vector<graph::Graph>& graphs, std::size_t feature_dim,
                         std::shared_ptr<const gnn::GraphBatch> shared_batch) {
  TaskView v;
  v.kind = kind;
  v.batch = shared_batch ? std::move(shared_batch)
                         : std::make_shared<const gnn::GraphBatch>(gnn::GraphBatch::build(graphs, feature_dim));
  if (v.batch->num_graphs() != graphs.size()) throw std::invalid_argument("TaskView: batch does not match graphs");
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const graph::Graph& g = graphs[gi];
    const std::size_t off = v.batch->offsets[gi];
    switch (kind) {
      case TaskKind::kGC:
        if (!g.graph_label) missing(kind, g, "graph label");
        v.labels.push_back(*g.graph_label);
        break;
      case TaskKind::kNC:
        if (!g.has_node_labels()) missing(kind, g, "node labels");
        if (g.labelled_nodes) {
          for (std::size_t n : *g.labelled_nodes) {
            v.nodes.push_back(off + n);
            v.labels.push_back(g.node_labels[n]);
          }
        } else {
          for (std::size_t n = 0; n < g.num_nodes; ++n) {
            v.nodes.push_back(off + n);
            v.labels.push_back(g.node_labels[n]);
          }
        }
        break;
      case TaskKind::kLP:
        if (!g.positive_edges || !g.negative_edges) missing(kind, g, "query edges");
        for (const auto& e : *g.positive_edges) {
          v.pairs.push_back(graph::Edge{off + e.u, off + e.v});
          v.labels.push_back(1);
        }
        break;
    }
  }
  if (kind == TaskKind::kLP) {
    // negatives after all positives keeps the label layout easy to audit
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const std::size_t off = v.batch->offsets[gi];
      for (const auto& e : *graphs[gi].negative_edges) {
        v.pairs.push_back(graph::Edge{off + e.u, off + e.v});
        v.labels.push_back(0);
      }
    }
  }
  if (v.labels.empty()) {
    throw std::invalid_argument("task " + std::string(episodes::task_name(kind)) + ": empty label set");
  }
  return v;
}

PreparedTask prepare_task(const episodes::TaskData& task, std::size_t feature_dim) {
  if (task.support.empty()) {
    throw std::invalid_argument("task " + std::string(episodes::task_name(task.kind)) + ": empty support set");
  }
  if (task.target.empty()) {
    throw std::invalid_argument("task " + std::string(episodes::task_name(task.kind)) + ": empty target set");
  }
  PreparedTask p;
  p.kind = task.kind;
  p.shared_topology = task.kind != TaskKind::kGC;
  p.support = TaskView::build(task.kind, task.support, feature_dim);
  p.target = TaskView::build(task.kind, task.target, feature_dim, p.shared_topology ? p.support.batch : nullptr);
  return p;
}

PreparedEpisode prepare_episode(const episodes::MultiTaskEpisode& episode, std::size_t feature_dim) {
  PreparedEpisode p;
  p.id = episode.id;
  p.lambdas = episode.lambdas;
  p.concurrent = episode.concurrent;
  for (const auto& t : episode.tasks) p.tasks.push_back(prepare_task(t, feature_dim));
  return p;
}

ad::Var task_loss_from_embedding(const ad::Var& h, const gnn::ParamVars& p, const TaskView& view) {
  switch (view.kind) {
    case TaskKind::kGC:
      return gnn::cross_entropy_with_logits(gnn::gc_logits(h, *view.batch, p), view.labels);
    case TaskKind::kNC:
      return gnn::cross_entropy_with_logits(gnn::nc_logits(ad::gather_rows(h, view.nodes), p), view.labels);
    case TaskKind::kLP:
      return gnn::binary_cross_entropy_with_logits(gnn::lp_logits(h, view.pairs, p), view.labels);
  }
  throw std::logic_error("task_loss: unknown task");
}

ad::Var task_loss(const gnn::ParamVars& p, const gnn::GnnConfig& config, const TaskView& view) {
  return task_loss_from_embedding(gnn::encode(p, config, *view.batch), p, view);
}

}  // namespace metagraph::training
