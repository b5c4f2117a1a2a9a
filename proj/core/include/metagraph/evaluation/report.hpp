// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "metagraph/evaluation/protocol.hpp"

namespace metagraph::evaluation {

/// "accuracy" for GC and NC, "roc_auc" for LP.
std::string_view metric_name(TaskKind kind);

inline constexpr const char* kCsvHeader = "config_hash,dataset,mode,tasks,protocol,seed,fold,task,metric,value";

/// One row per fold, task and metric. Failed folds emit a row with
/// metric "error" and an empty value; delta_m rows use task "all".
void write_csv(std::ostream& out, const MetricsReport& report, bool header = true);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

/// Writes <stem>.csv and <stem>.json into dir.
void save_report(const MetricsReport& report, const std::filesystem::path& dir, const std::string& stem);

}  // namespace metagraph::evaluation
