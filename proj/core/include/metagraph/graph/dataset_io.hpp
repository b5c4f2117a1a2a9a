// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0
//
// Internal dataset cache: one JSON document mirroring Dataset.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "metagraph/graph/graph.hpp"

namespace metagraph::graph {

inline constexpr const char* kDatasetFormat = "metagraph-dataset/1";

nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);

nlohmann::json dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const nlohmann::json& j);

void save_dataset(const Dataset& d, const std::filesystem::path& file);
Dataset load_dataset(const std::filesystem::path& file);

/// Content hash of the canonical JSON form.
std::string dataset_hash(const Dataset& d);

}  // namespace metagraph::graph
