// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <limits>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

#include "metagraph/gnn/params.hpp"
#include "metagraph/graph/folds.hpp"
#include "metagraph/graph/graph.hpp"
#include "metagraph/training/config.hpp"

namespace metagraph::training {

struct TrainOptions {
  /// Newline-delimited JSON log sink; records are also kept in the result.
  std::ostream* log = nullptr;
  /// When set, an episode whose outer gradient is not finite is written
  /// here before the error propagates.
  std::filesystem::path dump_dir;
  /// Fields merged into every log record, e.g. a config hash.
  nlohmann::json log_context = nlohmann::json::object();
};

struct TrainResult {
  /// Parameters at the best validation evaluation.
  gnn::ParameterSet params;
  double initial_validation = std::numeric_limits<double>::quiet_NaN();
  double best_validation = std::numeric_limits<double>::quiet_NaN();
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  bool stopped_early = false;
  std::size_t clipped_steps = 0;
  /// Only the backbone is meant for reuse (meta-trained models).
  bool heads_discardable = false;
  std::vector<nlohmann::json> log;
};

gnn::GnnConfig model_config(const graph::Dataset& dataset, const TrainConfig& config);

/// Meta-training: iSAME, eSAME, single-task SAME and the concurrent ablation.
TrainResult train_same(const graph::Dataset& dataset, const graph::FoldSplit& split,
                       const TrainConfig& config, const TrainOptions& options = {});

/// End-to-end training of backbone and heads on the summed task losses.
/// The concurrent ablation is accepted here too and runs the meta loop.
TrainResult train_classical(const graph::Dataset& dataset, const graph::FoldSplit& split,
                            const TrainConfig& config, const TrainOptions& options = {});

/// Continues classical multi-task training of `theta_all` on two tasks.
TrainResult fine_tune(const gnn::ParameterSet& theta_all, const graph::Dataset& dataset,
                      const graph::FoldSplit& split, const episodes::TaskSet& task_pair,
                      const TrainConfig& config, const TrainOptions& options = {});

/// Dispatches on config.mode. fine-tune first trains a classical model on
/// all three tasks, then fine-tunes it on config.tasks.
TrainResult train(const graph::Dataset& dataset, const graph::FoldSplit& split, const TrainConfig& config,
                  const TrainOptions& options = {});

}  // namespace metagraph::training
