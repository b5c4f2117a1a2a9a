// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/graph/folds.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "metagraph/random.hpp"

namespace metagraph::graph {

std::size_t validation_fold(std::size_t fold_index, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("validation_fold: k must be >= 2");
  const std::size_t offset = 1 + static_cast<std::size_t>(splitmix64(seed) % (k - 1));
  return (fold_index + offset) % k;
}

std::vector<FoldSplit> make_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  const std::size_t n = dataset.graphs.size();
  if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
  if (n == 0) throw std::invalid_argument("make_folds: dataset is empty");
  if (k > n) {
    throw std::invalid_argument("make_folds: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(n) + " graphs");
  }

  // Strata keyed by graph label; unlabelled graphs form their own stratum.
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) {
    strata[dataset.graphs[i].graph_label.value_or(-1)].push_back(i);
  }
  Rng rng(derive_seed(seed, {0x666f6c64}));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t position = 0;
  for (auto& [label, ids] : strata) {
    shuffle(ids, rng);
    // dealing continues across strata so fold sizes also differ by <= 1
    for (std::size_t id : ids) folds[position++ % k].push_back(id);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());

  std::vector<FoldSplit> splits(k);
  for (std::size_t i = 0; i < k; ++i) {
    FoldSplit& s = splits[i];
    s.fold_index = i;
    const std::size_t v = validation_fold(i, k, seed);
    s.test_graph_ids = folds[i];
    s.validation_graph_ids = folds[v];
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i || j == v) continue;
      s.train_graph_ids.insert(s.train_graph_ids.end(), folds[j].begin(), folds[j].end());
    }
    std::sort(s.train_graph_ids.begin(), s.train_graph_ids.end());
  }
  return splits;
}

}  // namespace metagraph::graph
