// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include "metagraph/episodes/episode.hpp"

namespace metagraph::episodes {

/// Audit form: per-task graph ids, node ids and query edges. Features are
/// omitted.
nlohmann::json episode_to_json(const MultiTaskEpisode& episode);

/// Rebuilds an episode from its audit form. Graphs come back without
/// features, which is enough for validate_episode.
MultiTaskEpisode episode_from_json(const nlohmann::json& j);

}  // namespace metagraph::episodes
