// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/cli/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "metagraph/graph/dataset_io.hpp"
#include "metagraph/graph/tudataset.hpp"
#include "metagraph/hash.hpp"

namespace metagraph::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kQuickFactor = 100;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("run config: " + what); }

json synth_to_json(const graph::SynthSpec& s) {
  return {{"num_graphs", s.num_graphs},   {"min_nodes", s.min_nodes},
          {"max_nodes", s.max_nodes},     {"num_graph_classes", s.num_graph_classes},
          {"num_node_classes", s.num_node_classes}, {"feature_dim", s.feature_dim},
          {"strength", s.strength}};
}

graph::SynthSpec synth_from_json(const json& j, graph::SynthSpec s) {
  for (const auto& [key, v] : j.items()) {
    if (key == "num_graphs") s.num_graphs = v.get<std::size_t>();
    else if (key == "min_nodes") s.min_nodes = v.get<std::size_t>();
    else if (key == "max_nodes") s.max_nodes = v.get<std::size_t>();
    else if (key == "num_graph_classes") s.num_graph_classes = v.get<int>();
    else if (key == "num_node_classes") s.num_node_classes = v.get<int>();
    else if (key == "feature_dim") s.feature_dim = v.get<std::size_t>();
    else if (key == "strength") s.strength = v.get<double>();
    else fail("unknown synthetic key '" + key + "'");
  }
  return s;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::vector<std::string> name_variants(const std::string& name) {
  std::vector<std::string> out{name};
  if (upper(name) != name) out.push_back(upper(name));
  return out;
}

std::optional<std::filesystem::path> find_dataset(const RunConfig& c) {
  if (!c.dataset_path.empty()) return std::filesystem::path(c.dataset_path);
  const auto root = data_root(c);
  for (const auto& n : name_variants(c.dataset)) {
    if (std::filesystem::is_regular_file(cache_path(root, n))) return cache_path(root, n);
  }
  for (const auto& n : name_variants(c.dataset)) {
    if (std::filesystem::is_directory(root / n)) return root / n;
  }
  return std::nullopt;
}

}  // namespace

json run_config_to_json(const RunConfig& c) {
  return {{"train", training::train_config_to_json(c.train)},
          {"dataset", c.dataset},
          {"dataset_path", c.dataset_path},
          {"data_dir", c.data_dir},
          {"out", c.out},
          {"protocol", evaluation::protocol_name(c.protocol)},
          {"linear_for_meta", c.linear_for_meta},
          {"svm_c", c.svm_c},
          {"num_folds", c.num_folds},
          {"fold", c.fold},
          {"only_folds", c.only_folds},
          {"append_node_labels", c.append_node_labels},
          {"quick", c.quick},
          {"synthetic", synth_to_json(c.synthetic)},
          {"synthetic_seed", c.synthetic_seed}};
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) fail("expected a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "train") {
      c.train = training::train_config_from_json(v, c.train);
    } else if (key == "dataset") {
      c.dataset = v.get<std::string>();
    } else if (key == "dataset_path") {
      c.dataset_path = v.get<std::string>();
    } else if (key == "data_dir") {
      c.data_dir = v.get<std::string>();
    } else if (key == "out") {
      c.out = v.get<std::string>();
    } else if (key == "protocol") {
      const auto p = evaluation::parse_protocol(v.get<std::string>());
      if (!p) fail("unknown protocol '" + v.get<std::string>() + "'");
      c.protocol = *p;
    } else if (key == "linear_for_meta") {
      c.linear_for_meta = v.get<bool>();
    } else if (key == "svm_c") {
      c.svm_c = v.get<double>();
    } else if (key == "num_folds") {
      c.num_folds = v.get<std::size_t>();
    } else if (key == "fold") {
      c.fold = v.get<std::size_t>();
    } else if (key == "only_folds") {
      c.only_folds = v.get<std::vector<std::size_t>>();
    } else if (key == "append_node_labels") {
      c.append_node_labels = v.get<bool>();
    } else if (key == "quick") {
      c.quick = v.get<bool>();
    } else if (key == "synthetic") {
      c.synthetic = synth_from_json(v, c.synthetic);
    } else if (key == "synthetic_seed") {
      c.synthetic_seed = v.get<std::uint64_t>();
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& file, RunConfig base) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + file.string() + ": " + e.what());
  }
  return run_config_from_json(j, std::move(base));
}

std::string config_hash(const RunConfig& c) {
  json j = run_config_to_json(c);
  for (const char* k : {"out", "data_dir", "dataset_path"}) j.erase(k);
  return hex_digest(j.dump());
}

training::TrainConfig effective_train_config(const RunConfig& c) {
  training::TrainConfig t = c.train;
  if (c.quick) {
    t.epochs = std::max<std::size_t>(1, t.effective_epochs() / kQuickFactor);
    t.batch_divisor *= kQuickFactor;
  }
  return t;
}

std::filesystem::path data_root(const RunConfig& c) {
  if (!c.data_dir.empty()) return c.data_dir;
  if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
  return "data";
}

std::filesystem::path cache_path(const std::filesystem::path& root, const std::string& name) {
  return root / "cache" / (name + ".json");
}

bool dataset_available(const RunConfig& c) {
  if (c.dataset == kSyntheticDataset && c.dataset_path.empty()) return true;
  const auto p = find_dataset(c);
  return p && std::filesystem::exists(*p);
}

graph::Dataset load_run_dataset(const RunConfig& c) {
  if (c.dataset == kSyntheticDataset && c.dataset_path.empty()) {
    return graph::synth_dataset(c.synthetic, c.synthetic_seed);
  }
  const auto path = find_dataset(c);
  if (!path) {
    throw std::runtime_error("dataset '" + c.dataset + "' not found under " + data_root(c).string() +
                             " (set " + kDataDirEnv + " or --data-dir)");
  }
  if (std::filesystem::is_regular_file(*path)) return graph::load_dataset(*path);
  graph::ParseOptions opts;
  opts.append_node_labels = c.append_node_labels;
  return graph::parse_tudataset(*path, path->filename().string(), opts);
}

}  // namespace metagraph::cli
