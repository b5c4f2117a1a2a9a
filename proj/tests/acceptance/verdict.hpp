// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace metagraph::acceptance {

/// kRan marks a smoke run that completed; its thresholds were not judged.
enum class Status { kPass, kFail, kBlocked, kRan };

struct Verdict {
  int criterion = 0;
  std::string title;
  Status status = Status::kFail;
  std::string detail;
};

inline const char* status_name(Status s) {
  switch (s) {
    case Status::kPass: return "PASS";
    case Status::kFail: return "FAIL";
    case Status::kBlocked: return "BLOCKED";
    case Status::kRan: return "RAN";
  }
  return "?";
}

inline void print(const Verdict& v) {
  std::cout << "criterion " << v.criterion << ": " << status_name(v.status) << "  " << v.title;
  if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
  std::cout << std::endl;
}

std::vector<Verdict> run_properties();

struct ReproductionOptions {
  std::string dataset = "ENZYMES";
  std::string data_dir;
  std::string dataset_path;
  std::string out = "acceptance_out";
  /// Shrinks every run to a few epochs and folds to exercise the pipeline;
  /// verdicts from such a run say nothing about the criteria.
  bool smoke = false;
};

std::vector<Verdict> run_reproduction(const ReproductionOptions& options);

}  // namespace metagraph::acceptance
