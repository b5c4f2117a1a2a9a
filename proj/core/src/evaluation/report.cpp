// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include "metagraph/evaluation/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace metagraph::evaluation {

using nlohmann::json;

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }
MeanStd mean_std_from(const json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

TaskKind task_from(const std::string& s) {
  const auto t = episodes::parse_task(s);
  if (!t) throw std::invalid_argument("unknown task '" + s + "'");
  return *t;
}

}  // namespace

std::string_view metric_name(TaskKind kind) { return kind == TaskKind::kLP ? "roc_auc" : "accuracy"; }

void write_csv(std::ostream& out, const MetricsReport& r, bool header) {
  if (header) out << kCsvHeader << '\n';
  const std::string prefix = quoted(r.config_hash) + ',' + quoted(r.dataset) + ',' + quoted(r.mode) + ',' +
                             quoted(r.tasks) + ',' + quoted(r.protocol) + ',' + std::to_string(r.seed) + ',';
  for (const auto& f : r.folds) {
    if (!f.error.empty()) {
      out << prefix << f.fold << ",all,error,\n";
      continue;
    }
    for (const auto& [task, v] : f.metrics) {
      out << prefix << f.fold << ',' << episodes::task_name(task) << ',' << metric_name(task) << ',' << number(v)
          << '\n';
    }
  }
  for (std::size_t i = 0; i < r.delta_m_per_fold.size(); ++i) {
    out << prefix << r.delta_m_folds.at(i) << ",all,delta_m," << number(r.delta_m_per_fold[i]) << '\n';
  }
}

json report_to_json(const MetricsReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    json metrics = json::object();
    for (const auto& [task, v] : f.metrics) metrics[std::string(episodes::task_name(task))] = v;
    json entry = {{"fold", f.fold}, {"metrics", metrics}};
    if (!f.error.empty()) entry["error"] = f.error;
    folds.push_back(entry);
  }
  json summary = json::object();
  for (const auto& [task, m] : r.summary) {
    json s = mean_std_json(m);
    s["metric"] = metric_name(task);
    summary[std::string(episodes::task_name(task))] = s;
  }
  json baseline = json::object();
  for (const auto& [task, v] : r.baseline) baseline[std::string(episodes::task_name(task))] = v;
  return {{"dataset", r.dataset},
          {"mode", r.mode},
          {"tasks", r.tasks},
          {"protocol", r.protocol},
          {"seed", r.seed},
          {"config_hash", r.config_hash},
          {"folds", folds},
          {"summary", summary},
          {"baseline", baseline},
          {"delta_m_folds", r.delta_m_folds},
          {"delta_m_per_fold", r.delta_m_per_fold},
          {"delta_m", r.delta_m ? mean_std_json(*r.delta_m) : json(nullptr)},
          {"partial", r.partial},
          {"failed_folds", r.failed_folds()}};
}

MetricsReport report_from_json(const json& j) {
  MetricsReport r;
  r.dataset = j.at("dataset").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.tasks = j.at("tasks").get<std::string>();
  r.protocol = j.at("protocol").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& f : j.at("folds")) {
    FoldResult fr;
    fr.fold = f.at("fold").get<std::size_t>();
    for (const auto& [task, v] : f.at("metrics").items()) fr.metrics[task_from(task)] = v.get<double>();
    fr.error = f.value("error", std::string());
    r.folds.push_back(std::move(fr));
  }
  for (const auto& [task, s] : j.at("summary").items()) r.summary[task_from(task)] = mean_std_from(s);
  for (const auto& [task, v] : j.at("baseline").items()) r.baseline[task_from(task)] = v.get<std::vector<double>>();
  r.delta_m_folds = j.at("delta_m_folds").get<std::vector<std::size_t>>();
  r.delta_m_per_fold = j.at("delta_m_per_fold").get<std::vector<double>>();
  if (!j.at("delta_m").is_null()) r.delta_m = mean_std_from(j.at("delta_m"));
  r.partial = j.at("partial").get<bool>();
  return r;
}

void save_report(const MetricsReport& report, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / (stem + ".csv"));
  std::ofstream js(dir / (stem + ".json"));
  if (!csv || !js) throw std::runtime_error("cannot write report into " + dir.string());
  write_csv(csv, report);
  js << report_to_json(report).dump(2) << '\n';
}

}  // namespace metagraph::evaluation
