// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/training/config.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace metagraph::training {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 7> kModes = {{
    {Mode::kISame, "isame"},
    {Mode::kESame, "esame"},
    {Mode::kClassicalSingle, "classical-single"},
    {Mode::kClassicalMulti, "classical-multi"},
    {Mode::kFineTune, "fine-tune"},
    {Mode::kAblationConcurrent, "ablation-concurrent"},
    {Mode::kAblationSingleTaskSame, "ablation-single-task-same"},
}};

void fail(const std::string& what) { throw std::invalid_argument("train config: " + what); }

}  // namespace

std::string_view mode_name(Mode m) {
  for (const auto& [mode, name] : kModes) {
    if (mode == m) return name;
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (const auto& [mode, n] : kModes) {
    if (n == name) return mode;
  }
  return std::nullopt;
}

bool is_meta_mode(Mode m) {
  return m == Mode::kISame || m == Mode::kESame || m == Mode::kAblationConcurrent ||
         m == Mode::kAblationSingleTaskSame;
}

void TrainConfig::validate() const {
  if (tasks.empty()) fail("no active tasks");
  if (!(inner_lr > 0.0)) fail("inner_lr must be > 0");
  if (!(outer_lr > 0.0)) fail("outer_lr must be > 0");
  for (double l : lambdas.values) {
    if (!(l >= 0.0 && l <= 1.0)) fail("lambdas must lie in [0, 1]");
  }
  if (batch_size == 0) fail("batch_size must be > 0");
  if (batch_divisor == 0) fail("batch_divisor must be > 0");
  if (eval_every == 0) fail("eval_every must be > 0");
  if (hidden == 0) fail("hidden must be > 0");
  if (!(clip_norm > 0.0)) fail("clip_norm must be > 0");
  if (ablation_inner != Mode::kISame && ablation_inner != Mode::kESame) {
    fail("ablation_inner must be isame or esame");
  }
  if ((mode == Mode::kClassicalSingle || mode == Mode::kAblationSingleTaskSame) && tasks.size() != 1) {
    fail(std::string(mode_name(mode)) + " needs exactly one task");
  }
  if (mode == Mode::kFineTune && tasks.size() != 2) fail("fine-tune needs exactly two tasks");
  if (is_meta_mode(mode) && batch_size < tasks.size()) fail("batch_size smaller than the task count");
}

std::size_t TrainConfig::effective_epochs() const {
  if (epochs) return *epochs;
  const bool single = tasks.size() == 1;
  if (is_meta_mode(mode)) return single ? 5000 : 15000;
  return single ? 1000 : 5000;
}

std::size_t TrainConfig::batches_per_epoch(std::size_t batches) const {
  return (batches + batch_divisor - 1) / batch_divisor;
}

bool TrainConfig::adapts_backbone() const {
  switch (mode) {
    case Mode::kISame: return true;
    case Mode::kESame: return false;
    case Mode::kAblationConcurrent:
    case Mode::kAblationSingleTaskSame: return ablation_inner == Mode::kISame;
    default: return false;
  }
}

json train_config_to_json(const TrainConfig& c) {
  json lambdas = json::object();
  for (auto t : episodes::kAllTasks) lambdas[std::string(episodes::task_name(t))] = c.lambdas[t];
  return json{{"mode", mode_name(c.mode)},
              {"tasks", c.tasks.str()},
              {"inner_steps", c.inner_steps},
              {"inner_lr", c.inner_lr},
              {"outer_lr", c.outer_lr},
              {"lambdas", lambdas},
              {"epochs", c.epochs ? json(*c.epochs) : json(nullptr)},
              {"eval_every", c.eval_every},
              {"patience", c.patience},
              {"first_order", c.first_order},
              {"batch_size", c.batch_size},
              {"batch_divisor", c.batch_divisor},
              {"seed", c.seed},
              {"clip_norm", c.clip_norm},
              {"ablation_inner", mode_name(c.ablation_inner)},
              {"hidden", c.hidden},
              {"unit_norm", c.unit_norm},
              {"residual", c.residual}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  if (!j.is_object()) fail("expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "mode" || key == "ablation_inner") {
      const auto m = parse_mode(value.get<std::string>());
      if (!m) fail("unknown mode '" + value.get<std::string>() + "'");
      (key == "mode" ? c.mode : c.ablation_inner) = *m;
    } else if (key == "tasks") {
      c.tasks = episodes::TaskSet::parse(value.get<std::string>());
    } else if (key == "lambdas") {
      for (const auto& [task, l] : value.items()) {
        const auto t = episodes::parse_task(task);
        if (!t) fail("unknown task in lambdas: " + task);
        c.lambdas[*t] = l.get<double>();
      }
    } else if (key == "inner_steps") {
      c.inner_steps = value.get<std::size_t>();
    } else if (key == "inner_lr") {
      c.inner_lr = value.get<double>();
    } else if (key == "outer_lr") {
      c.outer_lr = value.get<double>();
    } else if (key == "epochs") {
      if (value.is_null()) {
        c.epochs.reset();
      } else {
        c.epochs = value.get<std::size_t>();
      }
    } else if (key == "eval_every") {
      c.eval_every = value.get<std::size_t>();
    } else if (key == "patience") {
      c.patience = value.get<std::size_t>();
    } else if (key == "first_order") {
      c.first_order = value.get<bool>();
    } else if (key == "batch_size") {
      c.batch_size = value.get<std::size_t>();
    } else if (key == "batch_divisor") {
      c.batch_divisor = value.get<std::size_t>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "clip_norm") {
      c.clip_norm = value.get<double>();
    } else if (key == "hidden") {
      c.hidden = value.get<std::size_t>();
    } else if (key == "unit_norm") {
      c.unit_norm = value.get<bool>();
    } else if (key == "residual") {
      c.residual = value.get<bool>();
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return c;
}

}  // namespace metagraph::training
