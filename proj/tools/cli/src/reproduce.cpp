// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "metagraph/cli/commands.hpp"
#include "metagraph/evaluation/report.hpp"
#include "metagraph/hash.hpp"
#include "metagraph/log.hpp"

namespace metagraph::cli {

namespace fs = std::filesystem;
using episodes::TaskKind;
using episodes::TaskSet;
using evaluation::MetricsReport;
using training::Mode;

namespace {

const std::vector<TaskSet> kPairs = {TaskSet::parse("gc,nc"), TaskSet::parse("gc,lp"), TaskSet::parse("nc,lp")};
const std::vector<TaskSet> kCombos = {TaskSet::parse("gc,nc"), TaskSet::parse("gc,lp"), TaskSet::parse("nc,lp"),
                                      TaskSet::all()};

struct Cell {
  Cell(Mode m, TaskSet t, Mode i = Mode::kESame) : mode(m), tasks(t), inner(i) {}

  Mode mode;
  TaskSet tasks;
  Mode inner;
  std::optional<TaskKind> unseen;

  std::string name() const {
    std::string n = std::string(training::mode_name(mode));
    if (mode == Mode::kAblationConcurrent || mode == Mode::kAblationSingleTaskSame) {
      n += "-" + std::string(training::mode_name(inner));
    }
    n += "_" + tasks.str();
    if (unseen) n += "_to_" + std::string(episodes::task_name(*unseen));
    std::replace(n.begin(), n.end(), ',', '-');
    return n;
  }
};

TaskKind missing_task(const TaskSet& pair) {
  for (TaskKind k : episodes::kAllTasks) {
    if (!pair.contains(k)) return k;
  }
  throw std::logic_error("no missing task");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string check(const TaskSet& s, TaskKind k) { return s.contains(k) ? "x" : ""; }

std::string model_label(const Cell& c) {
  switch (c.mode) {
    case Mode::kClassicalSingle:
    case Mode::kClassicalMulti: return "Cl";
    case Mode::kFineTune: return "FT";
    case Mode::kISame: return "iSAME";
    case Mode::kESame: return "eSAME";
    default: return c.inner == Mode::kISame ? "(a)iSAME" : "(a)eSAME";
  }
}

class Runner {
 public:
  Runner(const RunConfig& run, const graph::Dataset& d, Io io) : run_(run), d_(d), io_(io) {}

  /// Cross-validated report of a cell, or nullopt when the cell failed as a whole.
  const std::optional<MetricsReport>& report(const Cell& cell) {
    const std::string name = cell.name();
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    std::optional<MetricsReport> result;
    RunConfig rc = run_;
    rc.train.mode = cell.mode;
    rc.train.tasks = cell.tasks;
    rc.train.ablation_inner = cell.inner;
    const std::string hash = config_hash(rc);
    io_.err << "cell " << name << " (config " << hash << ")\n";
    try {
      evaluation::CrossValidationSpec spec;
      spec.train = effective_train_config(rc);
      spec.protocol = rc.protocol;
      spec.num_folds = rc.num_folds;
      spec.fold_seed = rc.train.seed;
      spec.cell_id = fnv1a64(name);
      spec.only_folds = rc.only_folds;
      spec.config_hash = hash;
      spec.train_options.dump_dir = fs::path(rc.out) / "episodes";
      spec.train_options.log_context = {{"config_hash", hash}, {"cell", name}};
      spec.linear.c = rc.svm_c;
      spec.linear.seed = rc.train.seed;
      if (cell.unseen) {
        evaluation::TransferOptions options;
        options.linear_for_meta = rc.linear_for_meta;
        result = evaluation::cross_validate_transfer(d_, spec, *cell.unseen, options);
      } else {
        result = evaluation::cross_validate(d_, spec);
      }
      if (result->partial) complete_ = false;
    } catch (const std::exception& e) {
      io_.err << "cell " << name << " failed: " << e.what() << '\n';
      complete_ = false;
    }
    return cache_.emplace(name, std::move(result)).first->second;
  }

  /// Multi-task report with delta_m against the classical single-task cells.
  std::optional<MetricsReport> with_delta_m(const Cell& cell) {
    std::optional<MetricsReport> r = report(cell);
    if (!r) return r;
    std::map<TaskKind, MetricsReport> baselines;
    for (TaskKind k : cell.tasks.kinds()) {
      const auto& b = report(Cell{Mode::kClassicalSingle, TaskSet{k}});
      if (!b) return std::nullopt;
      baselines.emplace(k, *b);
    }
    evaluation::attach_delta_m(*r, baselines);
    cache_[cell.name()] = r;
    return r;
  }

  void save_cells() const {
    for (const auto& [name, r] : cache_) {
      if (r) evaluation::save_report(*r, fs::path(run_.out) / "cells", name);
    }
  }

  bool complete() const { return complete_; }

 private:
  const RunConfig& run_;
  const graph::Dataset& d_;
  Io io_;
  std::map<std::string, std::optional<MetricsReport>> cache_;
  bool complete_ = true;
};

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
};

Row metric_cells(const std::optional<MetricsReport>& r, TaskKind k) {
  if (!r || !r->summary.count(k)) return {"", ""};
  return {fmt(r->summary.at(k).mean), fmt(r->summary.at(k).std)};
}

Row provenance(const std::optional<MetricsReport>& r) {
  if (!r) return {"failed", ""};
  return {r->partial ? "partial" : "ok", r->config_hash};
}

Row concat(std::initializer_list<Row> parts) {
  Row out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Table table1(Runner& runner) {
  Table t{{"block", "gc", "nc", "lp", "gc_mean", "gc_std", "nc_mean", "nc_std", "lp_mean", "lp_std", "status",
           "config_hash"},
          {}};
  std::vector<std::pair<std::string, Cell>> cells;
  for (TaskKind k : episodes::kAllTasks) cells.push_back({"classical", Cell(Mode::kClassicalSingle, TaskSet{k})});
  for (const auto& p : kPairs) cells.push_back({"fine-tune", Cell(Mode::kFineTune, p)});
  for (const auto& c : kCombos) cells.push_back({"isame", Cell(Mode::kISame, c)});
  for (const auto& c : kCombos) cells.push_back({"esame", Cell(Mode::kESame, c)});
  for (const auto& [block, cell] : cells) {
    const auto& r = runner.report(cell);
    t.rows.push_back(concat({{block, check(cell.tasks, TaskKind::kGC), check(cell.tasks, TaskKind::kNC),
                              check(cell.tasks, TaskKind::kLP)},
                             metric_cells(r, TaskKind::kGC), metric_cells(r, TaskKind::kNC),
                             metric_cells(r, TaskKind::kLP), provenance(r)}));
  }
  return t;
}

Table delta_m_table(Runner& runner, const std::vector<Mode>& models, Mode inner_for_ablation) {
  Table t{{"gc", "nc", "lp", "model", "delta_m_mean", "delta_m_std", "status", "config_hash"}, {}};
  for (const auto& combo : kCombos) {
    for (Mode m : models) {
      if (m == Mode::kFineTune && combo.size() != 2) continue;
      const Cell cell{m, combo, m == Mode::kAblationConcurrent ? inner_for_ablation : Mode::kESame};
      const auto r = runner.with_delta_m(cell);
      Row dm = {"", ""};
      if (r && r->delta_m) dm = {fmt(r->delta_m->mean), fmt(r->delta_m->std)};
      t.rows.push_back(concat({{check(combo, TaskKind::kGC), check(combo, TaskKind::kNC),
                                check(combo, TaskKind::kLP), model_label(cell)},
                               dm, provenance(r ? r : runner.report(cell))}));
    }
  }
  return t;
}

Table transfer_table(Runner& runner, const std::vector<Cell>& models) {
  Table t{{"transfer", "model", "metric", "mean", "std", "status", "config_hash"}, {}};
  for (const auto& pair : kPairs) {
    const TaskKind unseen = missing_task(pair);
    for (Cell cell : models) {
      cell.tasks = pair;
      cell.unseen = unseen;
      const auto& r = runner.report(cell);
      t.rows.push_back(concat({{pair.str() + "->" + std::string(episodes::task_name(unseen)), model_label(cell),
                                std::string(evaluation::metric_name(unseen))},
                               metric_cells(r, unseen), provenance(r)}));
    }
  }
  return t;
}

Table single_task_ablation(Runner& runner) {
  Table t{{"task", "model", "metric", "mean", "std", "status", "config_hash"}, {}};
  for (TaskKind k : {TaskKind::kNC, TaskKind::kGC, TaskKind::kLP}) {
    for (const Cell& cell : {Cell{Mode::kClassicalSingle, TaskSet{k}},
                             Cell{Mode::kAblationSingleTaskSame, TaskSet{k}, Mode::kISame},
                             Cell{Mode::kAblationSingleTaskSame, TaskSet{k}, Mode::kESame}}) {
      const auto& r = runner.report(cell);
      t.rows.push_back(concat({{std::string(episodes::task_name(k)), model_label(cell),
                                std::string(evaluation::metric_name(k))},
                               metric_cells(r, k), provenance(r)}));
    }
  }
  return t;
}

std::string csv_field(const std::string& s) {
  return s.find_first_of(",\"") == std::string::npos ? s : "\"" + s + "\"";
}

void write_table(std::ostream& out, const Table& t) {
  const auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

using TableFn = std::function<Table(Runner&)>;

const std::map<std::string, TableFn>& tables() {
  static const std::map<std::string, TableFn> t = {
      {"table1", table1},
      {"table2",
       [](Runner& r) {
         return delta_m_table(r, {Mode::kClassicalMulti, Mode::kFineTune, Mode::kISame, Mode::kESame}, Mode::kESame);
       }},
      {"table4",
       [](Runner& r) {
         return transfer_table(r, {Cell{Mode::kClassicalMulti, {}}, Cell{Mode::kISame, {}}, Cell{Mode::kESame, {}}});
       }},
      {"table5", single_task_ablation},
      {"table6",
       [](Runner& r) {
         return transfer_table(r, {Cell{Mode::kAblationConcurrent, {}, Mode::kISame},
                                   Cell{Mode::kAblationConcurrent, {}, Mode::kESame}});
       }},
      {"table7",
       [](Runner& r) {
         Table a = delta_m_table(r, {Mode::kAblationConcurrent}, Mode::kISame);
         const Table b = delta_m_table(r, {Mode::kAblationConcurrent}, Mode::kESame);
         a.rows.insert(a.rows.end(), b.rows.begin(), b.rows.end());
         return a;
       }},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& table_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [id, _] : tables()) v.push_back(id);
    return v;
  }();
  return ids;
}

int cmd_reproduce(const RunConfig& run, const std::string& table, Io io) {
  const auto it = tables().find(table);
  if (it == tables().end()) {
    io.err << "reproduce: unknown table id '" << table << "' (expected one of";
    for (const auto& id : table_ids()) io.err << ' ' << id;
    io.err << ")\n";
    return kUsage;
  }
  const graph::Dataset d = load_run_dataset(run);
  fs::create_directories(run.out);
  echo_config(run);
  Runner runner(run, d, io);
  const Table t = it->second(runner);
  runner.save_cells();
  std::ofstream file(fs::path(run.out) / (table + ".csv"));
  write_table(file, t);
  write_table(io.out, t);
  if (!runner.complete()) {
    io.err << "reproduce: some cells failed or are partial\n";
    return kFailed;
  }
  return kOk;
}

}  // namespace metagraph::cli
