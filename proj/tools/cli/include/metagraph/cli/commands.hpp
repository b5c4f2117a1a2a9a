// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "metagraph/cli/run_config.hpp"
#include "metagraph/episodes/episode.hpp"

namespace metagraph::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

struct Io {
  std::ostream& out;
  std::ostream& err;
};

/// Parses a TUDataset directory and writes the dataset cache. An empty
/// `cache` writes to <data root>/cache/<name>.json.
int cmd_ingest(const std::filesystem::path& directory, const std::string& name, const std::filesystem::path& cache,
               const RunConfig& run, Io io);

/// Trains on one fold; writes checkpoint.json, train_log.ndjson,
/// train_summary.json and run_config.json into run.out.
int cmd_train(const RunConfig& run, Io io);

/// Scores a checkpoint on the fold's test graphs, or on `transfer` when set.
int cmd_eval(const RunConfig& run, const std::filesystem::path& checkpoint, std::optional<episodes::TaskKind> transfer, Io io);

/// Writes one episode built from the fold's training graphs as JSON.
int cmd_episode_dump(const RunConfig& run, Io io);

/// Table ids accepted by cmd_reproduce.
const std::vector<std::string>& table_ids();

/// Runs every cell of a results table under cross-validation and writes
/// <table>.csv plus per-cell reports.
int cmd_reproduce(const RunConfig& run, const std::string& table, Io io);

/// Full command line entry point.
int run_cli(const std::vector<std::string>& args, Io io);

/// Writes run_config.json (effective config plus its hash) into run.out.
void echo_config(const RunConfig& run);

}  // namespace metagraph::cli
