// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "metagraph/episodes/episode.hpp"

namespace metagraph::training {

enum class Mode : std::uint8_t {
  kISame,
  kESame,
  kClassicalSingle,
  kClassicalMulti,
  kFineTune,
  kAblationConcurrent,
  kAblationSingleTaskSame,
};

std::string_view mode_name(Mode m);  // "isame", "classical-single", ...
std::optional<Mode> parse_mode(std::string_view name);
bool is_meta_mode(Mode m);

struct TrainConfig {
  Mode mode = Mode::kESame;
  episodes::TaskSet tasks = episodes::TaskSet::all();
  std::size_t inner_steps = 1;
  double inner_lr = 1e-2;
  double outer_lr = 1e-3;
  episodes::Lambdas lambdas;
  /// Unset selects the mode's default.
  std::optional<std::size_t> epochs;
  std::size_t eval_every = 25;
  std::size_t patience = 20;
  bool first_order = false;
  std::size_t batch_size = 30;
  /// Each epoch visits only ceil(batches / batch_divisor) of its batches.
  std::size_t batch_divisor = 1;
  std::uint64_t seed = 0;
  double clip_norm = 10.0;
  /// Inner-loop variant (iSAME or eSAME) used by the two ablation modes.
  Mode ablation_inner = Mode::kESame;

  std::size_t hidden = 256;
  bool unit_norm = true;
  bool residual = true;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
  std::size_t effective_epochs() const;
  /// Whether the inner loop adapts the backbone as well as the heads.
  bool adapts_backbone() const;
  /// Batches visited in an epoch that has `batches` of them.
  std::size_t batches_per_epoch(std::size_t batches) const;

  bool operator==(const TrainConfig&) const = default;
};

nlohmann::json train_config_to_json(const TrainConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

}  // namespace metagraph::training
