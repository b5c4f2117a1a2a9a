// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metagraph/evaluation/linear.hpp"
#include "metagraph/evaluation/metrics.hpp"
#include "metagraph/gnn/params.hpp"
#include "metagraph/graph/folds.hpp"
#include "metagraph/training/config.hpp"
#include "metagraph/training/trainer.hpp"

namespace metagraph::evaluation {

using episodes::TaskKind;

/// Linear classifier on frozen embeddings, or the model's own heads.
enum class Protocol : std::uint8_t { kAuto, kLinear, kHeads };

std::string_view protocol_name(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);
/// kAuto resolves to kLinear for meta-trained modes and kHeads otherwise.
Protocol resolve_protocol(Protocol p, training::Mode mode);

/// Copies of the graphs that can be scored on `kind`, annotated for it. LP
/// graphs lose a seeded 20% of their edges, which become the positive
/// queries next to an equal number of sampled non-edges.
std::vector<graph::Graph> evaluation_graphs(std::span<const graph::Graph* const> graphs, TaskKind kind,
                                            std::uint64_t seed, int num_node_classes = 0);

struct TaskFeatures {
  ad::Tensor features;
  std::vector<int> labels;
};

/// Frozen-encoder features: one mean-pooled row per graph (GC), one row per
/// labelled node (NC) or one [h_u | h_v] row per query pair (LP).
TaskFeatures embed_for_task(const gnn::ParameterSet& theta, const std::vector<graph::Graph>& graphs,
                            TaskKind kind);

/// Percent accuracy (GC, NC) or ROC AUC (LP) of the model's own head.
double head_metric(const gnn::ParameterSet& theta, const std::vector<graph::Graph>& graphs, TaskKind kind);

/// Percent metric of a linear classifier fitted on `train` and scored on `test`.
double linear_metric(const gnn::ParameterSet& theta, const std::vector<graph::Graph>& train,
                     const std::vector<graph::Graph>& test, TaskKind kind, const LinearOptions& options = {});

/// Replaces the `kind` head with a freshly initialised one trained on frozen
/// embeddings; every other parameter is returned unchanged.
gnn::ParameterSet train_fresh_head(const gnn::ParameterSet& theta, TaskKind kind,
                                   const std::vector<graph::Graph>& train,
                                   const std::vector<graph::Graph>& validation,
                                   const training::TrainConfig& config);

struct FoldResult {
  std::size_t fold = 0;
  std::map<TaskKind, double> metrics;  // percent
  std::string error;                   // non-empty when the fold failed
};

struct MetricsReport {
  std::string dataset;
  std::string mode;
  std::string tasks;
  std::string protocol;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<FoldResult> folds;
  std::map<TaskKind, MeanStd> summary;
  /// Per-fold single-task baseline metrics used for delta_m, when attached.
  std::map<TaskKind, std::vector<double>> baseline;
  std::vector<std::size_t> delta_m_folds;
  std::vector<double> delta_m_per_fold;
  std::optional<MeanStd> delta_m;
  bool partial = false;

  std::vector<std::size_t> failed_folds() const;
};

struct CrossValidationSpec {
  training::TrainConfig train;
  Protocol protocol = Protocol::kAuto;
  std::size_t num_folds = 10;
  std::uint64_t fold_seed = 0;
  /// Mixed into each fold's training seed so grid cells draw distinct
  /// streams. Evaluation splits depend on the base seed and fold only.
  std::uint64_t cell_id = 0;
  /// Restricts the run to these fold indices; empty runs all.
  std::vector<std::size_t> only_folds;
  std::string config_hash;
  training::TrainOptions train_options;
  LinearOptions linear;
};

/// Percent metric per task of a trained model on one fold's test graphs.
/// `protocol` must be resolved; the linear variant fits on the training
/// and validation graphs.
std::map<TaskKind, double> evaluate_fold(const gnn::ParameterSet& theta, const graph::Dataset& dataset,
                                         const graph::FoldSplit& split, const episodes::TaskSet& tasks,
                                         Protocol protocol, std::uint64_t eval_seed,
                                         const LinearOptions& linear = {});

/// Seed of the held-out LP evaluation split for a fold.
std::uint64_t fold_eval_seed(std::uint64_t base_seed, std::size_t fold);

/// Trains and scores one model per fold, then aggregates mean and
/// population std. A failing fold is recorded and marks the report partial.
MetricsReport cross_validate(const graph::Dataset& dataset, const CrossValidationSpec& spec);

struct TransferOptions {
  /// Score meta-trained models with a linear classifier instead of a
  /// fresh head.
  bool linear_for_meta = false;
  /// Seed of the held-out LP evaluation split; derived from config.seed
  /// when unset.
  std::optional<std::uint64_t> eval_seed;
  LinearOptions linear;
};

/// Percent metric on `unseen` for a model trained without it.
double transfer_eval(const gnn::ParameterSet& model, const episodes::TaskSet& trained_tasks, TaskKind unseen,
                     const graph::Dataset& dataset, const graph::FoldSplit& split,
                     const training::TrainConfig& config, const TransferOptions& options = {});

/// Cross-validated transfer: trains on spec.train.tasks, scores `unseen`.
MetricsReport cross_validate_transfer(const graph::Dataset& dataset, const CrossValidationSpec& spec,
                                      TaskKind unseen, const TransferOptions& options = {});

/// Fills baseline, delta_m_per_fold and delta_m from per-task single-task
/// reports over the same folds.
void attach_delta_m(MetricsReport& report, const std::map<TaskKind, MetricsReport>& baselines);

}  // namespace metagraph::evaluation
