// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "metagraph/evaluation/protocol.hpp"
#include "metagraph/graph/graph.hpp"
#include "metagraph/graph/synthetic.hpp"
#include "metagraph/training/config.hpp"

namespace metagraph::cli {

inline constexpr const char* kDataDirEnv = "METAGRAPH_DATA_DIR";
inline constexpr const char* kSyntheticDataset = "synthetic";

struct RunConfig {
  training::TrainConfig train;
  std::string dataset = "ENZYMES";
  /// TUDataset directory or cached dataset JSON; overrides the lookup by name.
  std::string dataset_path;
  /// Dataset root; empty falls back to METAGRAPH_DATA_DIR, then "data".
  std::string data_dir;
  std::string out = "out";
  evaluation::Protocol protocol = evaluation::Protocol::kAuto;
  bool linear_for_meta = false;
  double svm_c = 1.0;
  std::size_t num_folds = 10;
  /// Fold used by train, eval and episode-dump.
  std::size_t fold = 0;
  /// Folds run by reproduce; empty runs all.
  std::vector<std::size_t> only_folds;
  bool append_node_labels = false;
  bool quick = false;
  graph::SynthSpec synthetic;
  std::uint64_t synthetic_seed = 0;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json run_config_to_json(const RunConfig& c);
/// Unknown keys are rejected. Missing keys keep the values of `base`.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& file, RunConfig base = {});

/// Hash of every field that influences results; output and data
/// locations are excluded.
std::string config_hash(const RunConfig& c);

/// Training config with the quick scaling applied.
training::TrainConfig effective_train_config(const RunConfig& c);

std::filesystem::path data_root(const RunConfig& c);
/// Synthetic data, an explicit path, a cached JSON under <root>/cache, or a
/// TUDataset directory under <root>, in that order.
graph::Dataset load_run_dataset(const RunConfig& c);
/// Whether load_run_dataset would find a non-synthetic dataset.
bool dataset_available(const RunConfig& c);
std::filesystem::path cache_path(const std::filesystem::path& root, const std::string& name);

}  // namespace metagraph::cli
