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

// Run logs (JSON lines) and multi-seed aggregation over label configurations.
//
// A run log starts with a header line {"type":"header","config":...,
// "seed":...}, continues with epoch (and, for mean-teacher runs, step) lines,
// and ends with either {"type":"final",...} or {"type":"failed","error":...}.

#ifndef SEQAED_REPORT_H_
#define SEQAED_REPORT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqaed/datagen.h"
#include "seqaed/meanteacher.h"
#include "seqaed/trainer.h"

namespace seqaed {

// The seven strong/weak/sequential combinations, in table order.
const std::vector<std::string>& label_grid_configs();

LabelSet parse_label_set(const std::string& name);
std::string label_set_name(const LabelSet& labels);

// Base weights with the terms of absent label forms zeroed.
LossWeights weights_for(const LabelSet& labels, const LossWeights& base);

// Fresh model sized for `data`, initialised from a seed derived from
// config.seed (distinct from the shuffling stream).
ToyModel initial_model(const Dataset& data, const TrainConfig& config);

struct RunOutcome {
  std::string log;  // complete JSON-lines text
  bool ok = false;
  EvalScores scores;
  std::optional<ToyModel> model;  // the evaluated model, when ok
};

// Trains from `model`, evaluates the final model on data.eval, and renders
// the run log. A NumericError becomes a "failed" record.
RunOutcome run_supervised(const std::string& config_name, ToyModel model,
                          const Dataset& data, const TrainConfig& config);

RunOutcome run_mean_teacher(const std::string& config_name, ToyModel model,
                            const Dataset& labeled,
                            const std::vector<Matrix>& unlabeled,
                            const MeanTeacherConfig& config);

struct RunSummary {
  std::string source;
  std::string config;
  std::uint64_t seed = 0;
  bool ok = false;
  double event_f = 0.0;
  double segment_f = 0.0;
  std::string error;
};

// Parses a run log; a log without a final record is reported as failed.
RunSummary summarize_run_log(const std::string& text,
                             const std::string& source);

struct ReportRow {
  std::string config;
  int runs = 0;
  int failed = 0;
  std::optional<double> median_event_f;
  std::optional<double> median_segment_f;
};

// One row per expected config (in order, even without runs), followed by any
// other configs found in `runs` in lexical order.
std::vector<ReportRow> aggregate_runs(
    const std::vector<RunSummary>& runs,
    const std::vector<std::string>& expected_configs);

double median(std::vector<double> values);

std::string format_report_table(const std::vector<ReportRow>& rows);

}  // namespace seqaed

#endif  // SEQAED_REPORT_H_
