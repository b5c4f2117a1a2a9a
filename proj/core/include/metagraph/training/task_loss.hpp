// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "metagraph/episodes/episode.hpp"
#include "metagraph/gnn/model.hpp"

namespace metagraph::training {

/// One view (support or target) of a task, laid out for the model.
struct TaskView {
  episodes::TaskKind kind = episodes::TaskKind::kGC;
  std::shared_ptr<const gnn::GraphBatch> batch;
  std::vector<std::size_t> nodes;   // NC: labelled nodes, batch-global
  std::vector<graph::Edge> pairs;   // LP: positives then negatives, batch-global
  std::vector<int> labels;          // one per graph (GC), node (NC) or pair (LP)

  /// Throws std::invalid_argument when the graphs lack the annotations
  /// `kind` needs or yield no labelled items.
  static TaskView build(episodes::TaskKind kind, const std::vector<graph::Graph>& graphs,
                        std::size_t feature_dim,
                        std::shared_ptr<const gnn::GraphBatch> shared_batch = nullptr);
};

struct PreparedTask {
  episodes::TaskKind kind = episodes::TaskKind::kGC;
  TaskView support;
  TaskView target;
  /// Support and target run on the same topology, so an embedding computed
  /// under unchanged backbone parameters serves both.
  bool shared_topology = false;
};

PreparedTask prepare_task(const episodes::TaskData& task, std::size_t feature_dim);

struct PreparedEpisode {
  std::uint64_t id = 0;
  std::vector<PreparedTask> tasks;
  episodes::Lambdas lambdas;
  bool concurrent = false;
};

PreparedEpisode prepare_episode(const episodes::MultiTaskEpisode& episode, std::size_t feature_dim);

/// Task loss from a precomputed embedding of view.batch.
ad::Var task_loss_from_embedding(const ad::Var& h, const gnn::ParamVars& p, const TaskView& view);
/// Task loss including the forward pass through the encoder.
ad::Var task_loss(const gnn::ParamVars& p, const gnn::GnnConfig& config, const TaskView& view);

}  // namespace metagraph::training
