// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metagraph/graph/graph.hpp"

namespace metagraph::episodes {

enum class TaskKind : std::uint8_t { kGC, kNC, kLP };

inline constexpr std::array<TaskKind, 3> kAllTasks = {TaskKind::kGC, TaskKind::kNC, TaskKind::kLP};

std::string_view task_name(TaskKind kind);  // "gc", "nc", "lp"
std::optional<TaskKind> parse_task(std::string_view name);

/// Set of tasks, iterated in the order GC, NC, LP.
class TaskSet {
 public:
  TaskSet() = default;
  TaskSet(std::initializer_list<TaskKind> tasks) {
    for (TaskKind t : tasks) insert(t);
  }
  static TaskSet all() { return {TaskKind::kGC, TaskKind::kNC, TaskKind::kLP}; }
  /// Parses a comma-separated list such as "gc,lp"; throws on unknown names.
  static TaskSet parse(std::string_view list);

  void insert(TaskKind t) { bits_ |= bit(t); }
  bool contains(TaskKind t) const { return (bits_ & bit(t)) != 0; }
  std::size_t size() const;
  bool empty() const { return bits_ == 0; }
  std::vector<TaskKind> kinds() const;
  std::string str() const;  // "gc,nc"
  bool operator==(const TaskSet&) const = default;

 private:
  static std::uint8_t bit(TaskKind t) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t)); }
  std::uint8_t bits_ = 0;
};

/// Balancing coefficient per task.
struct Lambdas {
  std::array<double, 3> values = {1.0, 1.0, 1.0};

  double operator[](TaskKind t) const { return values[static_cast<std::size_t>(t)]; }
  double& operator[](TaskKind t) { return values[static_cast<std::size_t>(t)]; }
  bool operator==(const Lambdas&) const = default;
};

/// Support and target views for one task. Graphs keep their dataset id.
///
/// GC views hold disjoint graphs. NC views hold the same graphs with
/// complementary labelled_nodes. LP views hold the same edge-removed graphs
/// with disjoint positive and negative query edges.
struct TaskData {
  TaskKind kind = TaskKind::kGC;
  std::vector<graph::Graph> support;
  std::vector<graph::Graph> target;
};

struct MultiTaskEpisode {
  std::uint64_t id = 0;
  std::vector<TaskData> tasks;  // one per active task, in GC, NC, LP order
  Lambdas lambdas;
  /// Every task ran on every graph (concurrent ablation) rather than one
  /// task per graph.
  bool concurrent = false;

  const TaskData* find(TaskKind kind) const;
};

/// Split fractions; counts are floored with a minimum of one.
inline constexpr double kGcSupportFraction = 0.6;
inline constexpr double kNcSupportFraction = 0.3;
inline constexpr double kLpTargetEdgeFraction = 0.2;
inline constexpr double kLpTargetNegativeFraction = 0.2;
inline constexpr std::size_t kLpMinEdges = 5;
inline constexpr std::size_t kNegativeSamplingAttemptFactor = 50;

/// max(1, floor(fraction * n)).
std::size_t split_count(std::size_t n, double fraction);

struct EpisodeOptions {
  /// Classes an NC graph must be able to cover; 0 uses the graph's own.
  int num_node_classes = 0;
};

/// Whether `g` carries what `kind` needs to be split.
bool supports_task(const graph::Graph& g, TaskKind kind, const EpisodeOptions& options = {});

/// Builds one episode with each graph assigned to exactly one active task.
/// Throws std::invalid_argument when an active task ends up with no usable
/// support or target data.
MultiTaskEpisode build_episode(std::span<const graph::Graph* const> batch, const Lambdas& lambdas,
                               const TaskSet& active_tasks, std::uint64_t seed,
                               const EpisodeOptions& options = {});
MultiTaskEpisode build_episode(const std::vector<graph::Graph>& batch, const Lambdas& lambdas,
                               const TaskSet& active_tasks, std::uint64_t seed,
                               const EpisodeOptions& options = {});

/// Every active task is applied to every graph that supports it.
MultiTaskEpisode build_concurrent_episode(std::span<const graph::Graph* const> batch,
                                          const Lambdas& lambdas, const TaskSet& active_tasks,
                                          std::uint64_t seed, const EpisodeOptions& options = {});

/// Split helpers for a single graph, shared with evaluation.
struct NcSplit {
  std::vector<std::size_t> support;
  std::vector<std::size_t> target;
};
NcSplit split_nodes(const graph::Graph& g, std::uint64_t seed);

struct LpSplit {
  std::vector<graph::Edge> remaining_edges;  // support positives
  std::vector<graph::Edge> removed_edges;    // target positives
  std::vector<graph::Edge> support_negatives;
  std::vector<graph::Edge> target_negatives;
};
LpSplit split_edges(const graph::Graph& g, std::uint64_t seed);

/// Up to `count` distinct canonical node pairs that are not edges of `g`.
std::vector<graph::Edge> sample_negative_edges(const graph::Graph& g, std::size_t count,
                                               std::uint64_t seed);

/// Diagnostic strings for every violated TaskData / episode invariant.
std::vector<std::string> validate_episode(const MultiTaskEpisode& episode);

}  // namespace metagraph::episodes
