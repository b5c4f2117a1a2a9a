// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "metagraph/cli/run_config.hpp"
#include "metagraph/evaluation/protocol.hpp"
#include "metagraph/evaluation/report.hpp"
#include "metagraph/hash.hpp"
#include "metagraph/log.hpp"
#include "verdict.hpp"

namespace metagraph::acceptance {
namespace {

namespace fs = std::filesystem;
using episodes::TaskKind;
using episodes::TaskSet;
using evaluation::MetricsReport;
using training::Mode;

std::string fmt(double x) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(1);
  s << x;
  return s.str();
}

class Runner {
 public:
  Runner(const ReproductionOptions& options, graph::Dataset data) : options_(options), data_(std::move(data)) {}

  const MetricsReport& cell(Mode mode, TaskSet tasks, Mode inner = Mode::kESame) {
    const std::string name = cell_name(mode, tasks, inner, "");
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    MetricsReport r = evaluation::cross_validate(data_, spec(mode, tasks, inner, name));
    evaluation::save_report(r, fs::path(options_.out) / "cells", name);
    return cache_.emplace(name, std::move(r)).first->second;
  }

  const MetricsReport& transfer(Mode mode, TaskSet tasks, TaskKind unseen) {
    const std::string name = cell_name(mode, tasks, Mode::kESame, "_to_" + std::string(episodes::task_name(unseen)));
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    MetricsReport r = evaluation::cross_validate_transfer(data_, spec(mode, tasks, Mode::kESame, name), unseen);
    evaluation::save_report(r, fs::path(options_.out) / "cells", name);
    return cache_.emplace(name, std::move(r)).first->second;
  }

  /// Delta_m of a multi-task cell against the classical single-task cells.
  std::optional<evaluation::MeanStd> delta_m(Mode mode, TaskSet tasks, Mode inner = Mode::kESame) {
    MetricsReport r = cell(mode, tasks, inner);
    std::map<TaskKind, MetricsReport> base;
    for (TaskKind t : tasks.kinds()) base[t] = cell(Mode::kClassicalSingle, TaskSet{t});
    evaluation::attach_delta_m(r, base);
    return r.delta_m;
  }

 private:
  static std::string cell_name(Mode mode, TaskSet tasks, Mode inner, const std::string& suffix) {
    std::string name(training::mode_name(mode));
    if (mode == Mode::kAblationConcurrent || mode == Mode::kAblationSingleTaskSame) {
      name += "-" + std::string(training::mode_name(inner));
    }
    std::string t = tasks.str();
    std::replace(t.begin(), t.end(), ',', '-');
    return name + "_" + t + suffix;
  }

  evaluation::CrossValidationSpec spec(Mode mode, TaskSet tasks, Mode inner, const std::string& name) const {
    evaluation::CrossValidationSpec s;
    s.train.mode = mode;
    s.train.tasks = tasks;
    s.train.ablation_inner = inner;
    s.cell_id = fnv1a64(name);
    s.train_options.dump_dir = fs::path(options_.out) / "episodes";
    s.train_options.log_context = {{"cell", name}};
    if (options_.smoke) {
      s.train.epochs = 2;
      s.train.hidden = 8;
      s.train.batch_size = 9;
      s.num_folds = 4;
      s.only_folds = {0};
    }
    return s;
  }

  ReproductionOptions options_;
  graph::Dataset data_;
  std::map<std::string, MetricsReport> cache_;
};

double mean_of(const MetricsReport& r, TaskKind t) {
  const auto it = r.summary.find(t);
  return it == r.summary.end() ? std::nan("") : it->second.mean;
}

bool complete(const MetricsReport& r) { return !r.partial && !r.folds.empty(); }

Verdict classical_single(Runner& run) {
  const MetricsReport& gc = run.cell(Mode::kClassicalSingle, TaskSet{TaskKind::kGC});
  const MetricsReport& nc = run.cell(Mode::kClassicalSingle, TaskSet{TaskKind::kNC});
  const MetricsReport& lp = run.cell(Mode::kClassicalSingle, TaskSet{TaskKind::kLP});
  const double g = mean_of(gc, TaskKind::kGC), n = mean_of(nc, TaskKind::kNC), l = mean_of(lp, TaskKind::kLP);
  const bool ok = complete(gc) && complete(nc) && complete(lp) && std::abs(g - 51.6) <= 8.0 &&
                  std::abs(n - 87.5) <= 6.0 && std::abs(l - 75.5) <= 8.0;
  return {7, "classical single-task", ok ? Status::kPass : Status::kFail,
          "GC " + fmt(g) + " (51.6+-8), NC " + fmt(n) + " (87.5+-6), LP " + fmt(l) + " (75.5+-8)"};
}

Verdict esame_three_tasks(Runner& run) {
  const MetricsReport& r = run.cell(Mode::kESame, TaskSet::all());
  const double g = mean_of(r, TaskKind::kGC), n = mean_of(r, TaskKind::kNC), l = mean_of(r, TaskKind::kLP);
  const bool ok = complete(r) && r.protocol == "linear" && n >= 80.0 && l >= 75.0 && g >= 44.0;
  return {8, "eSAME three-task, linear protocol", ok ? Status::kPass : Status::kFail,
          "GC " + fmt(g) + " (>=44), NC " + fmt(n) + " (>=80), LP " + fmt(l) + " (>=75)"};
}

Verdict transfer_gap(Runner& run) {
  const TaskSet seen{TaskKind::kGC, TaskKind::kNC};
  const MetricsReport& cl = run.transfer(Mode::kClassicalMulti, seen, TaskKind::kLP);
  const MetricsReport& is = run.transfer(Mode::kISame, seen, TaskKind::kLP);
  const MetricsReport& es = run.transfer(Mode::kESame, seen, TaskKind::kLP);
  const double c = mean_of(cl, TaskKind::kLP), i = mean_of(is, TaskKind::kLP), e = mean_of(es, TaskKind::kLP);
  const bool ok = complete(cl) && complete(is) && complete(es) && i - c >= 10.0 && e - c >= 10.0;
  return {9, "transfer gap GC,NC -> LP", ok ? Status::kPass : Status::kFail,
          "classical " + fmt(c) + ", iSAME " + fmt(i) + ", eSAME " + fmt(e) + "; need SAME - classical >= 10"};
}

Verdict degradation_ordering(Runner& run) {
  const TaskSet pair{TaskKind::kGC, TaskKind::kLP};
  const auto cl = run.delta_m(Mode::kClassicalMulti, pair);
  const auto is = run.delta_m(Mode::kISame, pair);
  const auto es = run.delta_m(Mode::kESame, pair);
  const auto show = [](const std::optional<evaluation::MeanStd>& d) { return d ? fmt(d->mean) : std::string("n/a"); };
  const bool ok = cl && is && es && cl->mean <= -10.0 && is->mean >= -5.0 && es->mean >= -5.0;
  return {10, "multi-task degradation ordering GC+LP", ok ? Status::kPass : Status::kFail,
          "delta_m classical " + show(cl) + " (<=-10), iSAME " + show(is) + ", eSAME " + show(es) + " (>=-5)"};
}

Verdict ablation_equivalence(Runner& run) {
  const std::vector<TaskSet> pairs{{TaskKind::kGC, TaskKind::kNC}, {TaskKind::kGC, TaskKind::kLP},
                                   {TaskKind::kNC, TaskKind::kLP}};
  bool ok = true;
  double worst = 0.0;
  for (Mode inner : {Mode::kISame, Mode::kESame}) {
    for (const TaskSet& p : pairs) {
      const auto same = run.delta_m(inner, p);
      const auto conc = run.delta_m(Mode::kAblationConcurrent, p, inner);
      if (!same || !conc) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(conc->mean - same->mean));
    }
  }
  ok = ok && worst <= 5.0;
  return {11, "concurrent ablation equivalence", ok ? Status::kPass : Status::kFail,
          "max |delta_m(concurrent) - delta_m(SAME)| = " + fmt(worst) + " over 3 pairs x iSAME/eSAME (<=5)"};
}

const char* const kTitles[] = {"classical single-task", "eSAME three-task, linear protocol",
                               "transfer gap GC,NC -> LP", "multi-task degradation ordering GC+LP",
                               "concurrent ablation equivalence"};

}  // namespace

std::vector<Verdict> run_reproduction(const ReproductionOptions& options) {
  cli::RunConfig rc;
  rc.dataset = options.dataset;
  rc.data_dir = options.data_dir;
  rc.dataset_path = options.dataset_path;
  std::vector<Verdict> out;
  if (!cli::dataset_available(rc)) {
    const std::string why = options.dataset + " not found under " + cli::data_root(rc).string() +
                            " (set " + cli::kDataDirEnv + " or pass --data-dir)";
    for (int k = 0; k < 5; ++k) {
      out.push_back({7 + k, kTitles[k], Status::kBlocked, why});
      print(out.back());
    }
    return out;
  }

  Runner run(options, cli::load_run_dataset(rc));
  for (auto check : {classical_single, esame_three_tasks, transfer_gap, degradation_ordering, ablation_equivalence}) {
    const int criterion = 7 + static_cast<int>(out.size());
    bool threw = false;
    try {
      out.push_back(check(run));
    } catch (const std::exception& e) {
      out.push_back({criterion, kTitles[criterion - 7], Status::kFail, e.what()});
      threw = true;
    }
    Verdict& v = out.back();
    if (options.smoke) {
      const bool produced =
          !threw && v.detail.find("nan") == std::string::npos && v.detail.find("n/a") == std::string::npos;
      v.status = produced ? Status::kRan : Status::kFail;
      v.detail = "smoke run; " + v.detail;
    }
    print(out.back());
  }
  return out;
}

}  // namespace metagraph::acceptance
