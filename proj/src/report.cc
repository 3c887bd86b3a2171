// Copyright 2026 The seqaed Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqaed/report.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "seqaed/errors.h"
#include "seqaed/file_util.h"
#include "seqaed/serialization.h"

namespace seqaed {
namespace {

Json final_record(const EvalScores& scores) {
  Json j = {{"type", "final"},
            {"event_f", scores.event_f},
            {"segment_f", scores.segment_f}};
  j["peak_cluster"] = scores.peak_cluster ? Json(*scores.peak_cluster)
                                          : Json(nullptr);
  return j;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

}  // namespace

const std::vector<std::string>& label_grid_configs() {
  static const std::vector<std::string> configs = {
      "strong",          "weak",     "seq",           "strong+weak",
      "strong+seq",      "weak+seq", "strong+weak+seq"};
  return configs;
}

LabelSet parse_label_set(const std::string& name) {
  LabelSet labels{false, false, false};
  for (const auto& part : split(name, '+')) {
    if (part == "strong") {
      labels.strong = true;
    } else if (part == "weak") {
      labels.weak = true;
    } else if (part == "seq") {
      labels.sequential = true;
    } else {
      throw ValidationError("unknown label form '" + part +
                            "' (expected strong, weak or seq)");
    }
  }
  return labels;
}

std::string label_set_name(const LabelSet& labels) {
  std::vector<std::string> parts;
  if (labels.strong) parts.push_back("strong");
  if (labels.weak) parts.push_back("weak");
  if (labels.sequential) parts.push_back("seq");
  std::string name;
  for (const auto& p : parts) name += (name.empty() ? "" : "+") + p;
  return name;
}

LossWeights weights_for(const LabelSet& labels, const LossWeights& base) {
  return {labels.strong ? base.strong : 0.0, labels.weak ? base.weak : 0.0,
          labels.sequential ? base.seq : 0.0};
}

ToyModel initial_model(const Dataset& data, const TrainConfig& config) {
  constexpr std::uint64_t kInitStream = 0x9e3779b97f4a7c15ULL;
  return ToyModel({data.num_features, config.hidden, data.num_classes,
                   config.context},
                  config.seed ^ kInitStream);
}

RunOutcome run_supervised(const std::string& config_name, ToyModel model,
                          const Dataset& data, const TrainConfig& config) {
  std::ostringstream log;
  log << Json({{"type", "header"},
               {"config", config_name},
               {"mode", "supervised"},
               {"seed", config.seed},
               {"train_config", to_json(config)}})
             .dump()
      << '\n';
  RunOutcome outcome;
  try {
    auto result = train(std::move(model), data, config, [&](const EpochLog& e) {
      log << to_json(e).dump() << '\n';
    });
    outcome.scores = evaluate(result.model, data, config);
    log << final_record(outcome.scores).dump() << '\n';
    outcome.ok = true;
    outcome.model = std::move(result.model);
  } catch (const NumericError& e) {
    log << Json({{"type", "failed"}, {"error", e.what()}}).dump() << '\n';
  }
  outcome.log = log.str();
  return outcome;
}

RunOutcome run_mean_teacher(const std::string& config_name, ToyModel model,
                            const Dataset& labeled,
                            const std::vector<Matrix>& unlabeled,
                            const MeanTeacherConfig& config) {
  std::ostringstream log;
  log << Json({{"type", "header"},
               {"config", config_name},
               {"mode", "mean_teacher"},
               {"seed", config.train.seed},
               {"train_config", to_json(config)}})
             .dump()
      << '\n';
  RunOutcome outcome;
  try {
    MeanTeacherCallbacks callbacks;
    callbacks.on_step = [&](const StepLog& s) {
      log << to_json(s).dump() << '\n';
    };
    callbacks.on_epoch = [&](const EpochLog& e) {
      log << to_json(e).dump() << '\n';
    };
    auto result = train_semisupervised(std::move(model), labeled, unlabeled,
                                       config, callbacks);
    outcome.scores = evaluate(result.teacher, labeled, config.train);
    log << final_record(outcome.scores).dump() << '\n';
    outcome.ok = true;
    outcome.model = std::move(result.teacher);
  } catch (const NumericError& e) {
    log << Json({{"type", "failed"}, {"error", e.what()}}).dump() << '\n';
  }
  outcome.log = log.str();
  return outcome;
}

RunSummary summarize_run_log(const std::string& text,
                             const std::string& source) {
  RunSummary run;
  run.source = source;
  run.error = "no final record";
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " +
                           e.what(),
                       line_no);
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      run.config = j.at("config").get<std::string>();
      run.seed = j.value("seed", std::uint64_t{0});
      have_header = true;
    } else if (type == "final") {
      run.ok = true;
      run.error.clear();
      run.event_f = j.at("event_f").get<double>();
      run.segment_f = j.at("segment_f").get<double>();
    } else if (type == "failed") {
      run.ok = false;
      run.error = j.value("error", "failed");
    }
  }
  if (!have_header) throw ParseError(source + ": missing header record", 1);
  return run;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<ReportRow> aggregate_runs(
    const std::vector<RunSummary>& runs,
    const std::vector<std::string>& expected_configs) {
  std::vector<std::string> order = expected_configs;
  std::set<std::string> extra;
  for (const auto& r : runs) {
    if (std::find(order.begin(), order.end(), r.config) == order.end()) {
      extra.insert(r.config);
    }
  }
  order.insert(order.end(), extra.begin(), extra.end());

  std::vector<ReportRow> rows;
  for (const auto& config : order) {
    ReportRow row;
    row.config = config;
    std::vector<double> event_f, segment_f;
    for (const auto& r : runs) {
      if (r.config != config) continue;
      ++row.runs;
      if (!r.ok) {
        ++row.failed;
        continue;
      }
      event_f.push_back(r.event_f);
      segment_f.push_back(r.segment_f);
    }
    if (!event_f.empty()) {
      row.median_event_f = median(event_f);
      row.median_segment_f = median(segment_f);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_report_table(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-18s %6s %7s %6s %10s %10s  %s\n", "config",
                "strong", "weak", "seq", "event-F", "segment-F", "status");
  out << buf;
  for (const auto& row : rows) {
    LabelSet labels{false, false, false};
    bool grid = true;
    try {
      labels = parse_label_set(row.config);
    } catch (const ValidationError&) {
      grid = false;
    }
    auto mark = [&](bool on) { return grid ? (on ? "x" : "") : "?"; };
    std::string status = "ok";
    if (row.runs == 0) {
      status = "MISSING";
    } else if (row.failed == row.runs) {
      status = "FAILED (" + std::to_string(row.failed) + "/" +
               std::to_string(row.runs) + ")";
    } else if (row.failed > 0) {
      status = "partial (" + std::to_string(row.failed) + " failed of " +
               std::to_string(row.runs) + ")";
    } else {
      status = "ok (" + std::to_string(row.runs) + " runs)";
    }
    std::snprintf(buf, sizeof(buf), "%-18s %6s %7s %6s %10s %10s  %s\n",
                  row.config.c_str(), mark(labels.strong), mark(labels.weak),
                  mark(labels.sequential), cell(row.median_event_f).c_str(),
                  cell(row.median_segment_f).c_str(), status.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace seqaed
