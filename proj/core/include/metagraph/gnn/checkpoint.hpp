// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "metagraph/gnn/params.hpp"

namespace metagraph::gnn {

inline constexpr const char* kCheckpointFormat = "metagraph-checkpoint/1";

struct Checkpoint {
  ParameterSet params;
  /// Run configuration that produced the parameters, stored verbatim.
  nlohmann::json run_config = nlohmann::json::object();
  std::string config_hash;
  /// Set when only the backbone is meant to be reused downstream.
  bool heads_discardable = false;
};

nlohmann::json config_to_json(const GnnConfig& c);
GnnConfig config_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Checkpoint& c);
/// Throws std::runtime_error on a wrong format tag or mismatched shapes.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace metagraph::gnn
