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

// seqaed: label conversion, synthetic data, losses, training and reports.
//
// Exit codes: 0 success, 1 usage, 2 invalid input, 3 runtime failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seqaed/ctc.h"
#include "seqaed/ctl.h"
#include "seqaed/datagen.h"
#include "seqaed/errors.h"
#include "seqaed/file_util.h"
#include "seqaed/labels.h"
#include "seqaed/meanteacher.h"
#include "seqaed/metrics.h"
#include "seqaed/report.h"
#include "seqaed/serialization.h"
#include "seqaed/trainer.h"

namespace seqaed {
namespace {

enum class LogLevel { kQuiet = 0, kError = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SEQAED_LOG_LEVEL");
    const std::string v = env ? env : "info";
    if (v == "quiet") return LogLevel::kQuiet;
    if (v == "error") return LogLevel::kError;
    if (v == "debug") return LogLevel::kDebug;
    return LogLevel::kInfo;
  }();
  return level;
}

void log(LogLevel level, const std::string& message) {
  if (level <= log_level()) std::cerr << message << '\n';
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

ClassVocabulary vocabulary_for(const std::vector<std::string>& tsv_paths,
                               const std::string& vocab_path) {
  if (!vocab_path.empty()) {
    return vocabulary_from_json(read_json_file(vocab_path));
  }
  std::set<std::string> names;
  for (const auto& p : tsv_paths) {
    for (auto& n : scan_class_names(p)) names.insert(n);
  }
  return ClassVocabulary({names.begin(), names.end()});
}

// ---------------------------------------------------------------- convert

struct ConvertArgs {
  std::string in;
  std::string out;
  std::string vocab;
};

int run_convert(const ConvertArgs& a) {
  const ClassVocabulary vocab = vocabulary_for({a.in}, a.vocab);
  const AnnotationMap anns = read_annotations(a.in, vocab);
  std::ostringstream out;
  for (const auto& [clip, ann] : anns) {
    Json weak = Json::array();
    for (int c : strong_to_weak(ann, vocab.size())) weak.push_back(vocab.name(c));
    out << Json({{"clip", clip},
                 {"sequential",
                  sequential_to_json(strong_to_sequential(ann, vocab.size()),
                                     vocab)},
                 {"weak", weak}})
               .dump()
        << '\n';
  }
  atomic_write(a.out, out.str());
  log(LogLevel::kInfo, "convert: " + std::to_string(anns.size()) +
                           " clips -> " + a.out);
  return 0;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
  int train = 300;
  int eval = 100;
  int unlabeled = 0;
};

int run_gen(const GenArgs& a) {
  GenSpec spec;
  if (!a.config.empty()) spec = gen_spec_from_json(read_json_file(a.config));
  if (a.seed) spec.seed = *a.seed;
  validate_spec(spec);
  if (a.train < 0 || a.eval < 0 || a.unlabeled < 0) {
    throw ValidationError("clip counts must be >= 0");
  }
  SyntheticDataset data;
  data.spec = spec;
  data.vocab = synthetic_vocabulary(spec.classes);
  data.splits["train"] = generate(spec, a.train, 0);
  data.splits["eval"] = generate(spec, a.eval, a.train);
  if (a.unlabeled > 0) {
    data.splits["unlabeled"] = generate(spec, a.unlabeled, a.train + a.eval);
  }
  save_dataset(a.out, data);
  log(LogLevel::kInfo, "gen: wrote " + a.out);
  return 0;
}

// ---------------------------------------------------------------- loss

struct LossArgs {
  std::string kind = "ctl";
  std::string post;
  std::string target;
  bool close_at_end = false;
};

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError("posteriors must be a non-empty array of rows");
  }
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()),
           static_cast<Eigen::Index>(cols));
  for (std::size_t t = 0; t < j.size(); ++t) {
    if (!j[t].is_array() || j[t].size() != cols) {
      throw ValidationError("posterior row " + std::to_string(t) +
                            " has the wrong length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) =
          j[t][k].get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(t, k));
    rows.push_back(row);
  }
  return rows;
}

int run_loss(const LossArgs& a) {
  const Json post = read_json_file(a.post);
  const ClassVocabulary vocab(post.at("classes").get<std::vector<std::string>>());
  const Matrix y = matrix_from_json(post.at("y"));
  Json target_json = read_json_file(a.target);
  if (target_json.is_object()) target_json = target_json.at("sequential");
  const SequentialLabel target = sequential_from_json(target_json, vocab);

  LossResult r;
  if (parse_seq_kind(a.kind) == SeqLossKind::kCtc) {
    r = ctc_loss(y, target);
  } else {
    if (y.cols() != vocab.size()) {
      throw ValidationError("CTL posteriors need one column per class");
    }
    r = ctl_loss(y, target, {.close_at_end = a.close_at_end});
  }
  Json out = {{"kind", a.kind}, {"reachable", std::isfinite(r.loss)}};
  out["loss"] = std::isfinite(r.loss) ? Json(r.loss) : Json(nullptr);
  out["grad"] = matrix_to_json(r.grad);
  std::cout << out.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string labels = "strong";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string log;
  std::string checkpoint;
  std::string predictions;
  int limit = 0;
  std::string name;
};

SyntheticDataset load_for_training(const TrainArgs& a) {
  SyntheticDataset ds = load_dataset(a.data);
  for (const char* split : {"train", "eval"}) {
    if (!ds.splits.count(split)) {
      throw ValidationError(a.data + ": missing '" + split + "' split");
    }
  }
  auto& train = ds.splits["train"];
  if (a.limit < 0) throw ValidationError("--limit must be >= 0");
  if (a.limit > 0 && a.limit < static_cast<int>(train.size())) {
    train.resize(a.limit);
  }
  return ds;
}

void finish_run(const TrainArgs& a, const RunOutcome& run,
                const ClassVocabulary& vocab) {
  atomic_write(a.log, run.log);
  if (!a.predictions.empty() && run.ok) {
    AnnotationMap preds;
    for (const auto& c : run.scores.clips) preds[c.clip_id] = c.prediction;
    write_annotations(a.predictions, preds, vocab);
  }
  if (!a.checkpoint.empty() && run.ok) save_checkpoint(a.checkpoint, *run.model);
}

int run_train(const TrainArgs& a) {
  TrainConfig config;
  if (!a.config.empty()) {
    config = train_config_from_json(read_json_file(a.config));
  }
  if (a.seed) config.seed = *a.seed;
  const LabelSet labels = parse_label_set(a.labels);
  config.weights = weights_for(labels, config.weights);
  validate_config(config);

  const SyntheticDataset ds = load_for_training(a);
  const Dataset data = make_dataset(ds.spec, ds.splits.at("train"),
                                    ds.splits.at("eval"), labels);
  const std::string name = a.name.empty() ? label_set_name(labels) : a.name;
  const RunOutcome run =
      run_supervised(name, initial_model(data, config), data, config);
  finish_run(a, run, ds.vocab);
  if (!run.ok) {
    log(LogLevel::kError, "train: run failed, see " + a.log);
    return 3;
  }
  std::ostringstream msg;
  msg << "train " << name << " seed " << config.seed
      << ": event-F " << run.scores.event_f << " segment-F "
      << run.scores.segment_f;
  log(LogLevel::kInfo, msg.str());
  return 0;
}

int run_train_mt(const TrainArgs& a) {
  MeanTeacherConfig config;
  if (!a.config.empty()) {
    config = mean_teacher_config_from_json(read_json_file(a.config));
  }
  if (a.seed) config.train.seed = *a.seed;
  const LabelSet labels = parse_label_set(a.labels);
  config.train.weights = weights_for(labels, config.train.weights);
  validate_config(config);

  const SyntheticDataset ds = load_for_training(a);
  const Dataset data = make_dataset(ds.spec, ds.splits.at("train"),
                                    ds.splits.at("eval"), labels);
  std::vector<Matrix> unlabeled;
  if (auto it = ds.splits.find("unlabeled"); it != ds.splits.end()) {
    for (const auto& clip : it->second) unlabeled.push_back(clip.features);
  }
  const std::string name =
      a.name.empty() ? "mt:" + label_set_name(labels) : a.name;
  const RunOutcome run = run_mean_teacher(
      name, initial_model(data, config.train), data, unlabeled, config);
  finish_run(a, run, ds.vocab);
  if (!run.ok) {
    log(LogLevel::kError, "train-mt: run failed, see " + a.log);
    return 3;
  }
  std::ostringstream msg;
  msg << "train-mt " << name << " seed " << config.train.seed << ": event-F "
      << run.scores.event_f << " segment-F " << run.scores.segment_f;
  log(LogLevel::kInfo, msg.str());
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string ref;
  std::string pred;
  std::string vocab;
  double duration = 0.0;
  double segment = kDefaultSegmentSeconds;
  double collar = kDefaultOnsetCollarSeconds;
  double offset_ratio = kDefaultOffsetRatio;
};

int run_eval(const EvalArgs& a) {
  if (!(a.segment > 0.0)) throw ValidationError("--segment must be > 0");
  if (!(a.collar > 0.0)) throw ValidationError("--collar must be > 0");
  if (!(a.offset_ratio > 0.0 && a.offset_ratio <= 1.0)) {
    throw ValidationError("--offset-ratio must lie in (0, 1]");
  }
  const ClassVocabulary vocab = vocabulary_for({a.ref, a.pred}, a.vocab);
  const AnnotationMap ref = read_annotations(a.ref, vocab);
  const AnnotationMap pred = read_annotations(a.pred, vocab);
  std::set<std::string> ids;
  for (const auto& [id, _] : ref) ids.insert(id);
  for (const auto& [id, _] : pred) ids.insert(id);

  std::vector<ClipResult> results;
  for (const auto& id : ids) {
    ClipResult r;
    r.clip_id = id;
    if (auto it = ref.find(id); it != ref.end()) r.reference = it->second;
    if (auto it = pred.find(id); it != pred.end()) r.prediction = it->second;
    r.duration_s = a.duration;
    for (const auto* ann : {&r.reference, &r.prediction}) {
      for (const Event& e : ann->events) {
        r.duration_s = std::max(r.duration_s, e.offset_s);
      }
    }
    results.push_back(std::move(r));
  }
  Json out = {
      {"clips", results.size()},
      {"segment", to_json(segment_fscore(results, vocab.size(), a.segment),
                          vocab)},
      {"event", to_json(event_fscore(results, vocab.size(), a.collar,
                                     a.offset_ratio),
                        vocab)}};
  const auto pc = peak_cluster_score(results);
  out["peak_cluster"] = pc ? Json(*pc) : Json(nullptr);
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
};

int run_report(const ReportArgs& a) {
  std::vector<RunSummary> summaries;
  for (const auto& path : a.runs) {
    try {
      summaries.push_back(summarize_run_log(read_file(path), path));
    } catch (const ParseError& e) {
      log(LogLevel::kError, std::string("report: skipping ") + e.what());
    }
  }
  const std::string table =
      format_report_table(aggregate_runs(summaries, label_grid_configs()));
  std::cout << table;
  if (!a.out.empty()) atomic_write(a.out, table);
  return 0;
}

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--data", a.data, "Dataset directory written by `gen`")
      ->required();
  cmd->add_option("--labels", a.labels,
                  "Label forms, e.g. strong, weak+seq, strong+weak+seq");
  cmd->add_option("--config", a.config, "JSON config overriding defaults");
  cmd->add_option("--seed", a.seed, "Override the config seed");
  cmd->add_option("--log", a.log, "JSON-lines run log")->required();
  cmd->add_option("--predictions", a.predictions,
                  "Write eval-split predictions as TSV");
  cmd->add_option("--limit", a.limit, "Use only the first N training clips");
  cmd->add_option("--name", a.name, "Config name recorded in the log");
  cmd->add_option("--checkpoint", a.checkpoint,
                  "Save the evaluated model to <path>.bin and <path>.json");
}

int run(int argc, char** argv) {
  CLI::App app{"Sequential-label sound event detection toolkit", "seqaed"};
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* c = app.add_subcommand("convert",
                               "Strong TSV to sequential and weak JSON lines");
  c->add_option("--in", convert.in, "Strong annotation TSV")->required();
  c->add_option("--out", convert.out, "Output JSON-lines file")->required();
  c->add_option("--vocab", convert.vocab, "Vocabulary JSON (default: sorted names)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic dataset");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--config", gen.config, "GenSpec JSON");
  g->add_option("--seed", gen.seed, "Override the spec seed");
  g->add_option("--train", gen.train, "Training clips");
  g->add_option("--eval", gen.eval, "Evaluation clips");
  g->add_option("--unlabeled", gen.unlabeled, "Unlabeled clips");

  LossArgs loss;
  auto* l = app.add_subcommand("loss", "Evaluate CTC or CTL on a posteriorgram");
  l->add_option("--kind", loss.kind, "ctc or ctl")
      ->check(CLI::IsMember({"ctc", "ctl"}));
  l->add_option("--post", loss.post,
                "JSON {\"classes\": [...], \"y\": [[...], ...]}")
      ->required();
  l->add_option("--target", loss.target, "JSON array of \"onset:Name\" symbols")
      ->required();
  l->add_flag("--close-at-end", loss.close_at_end,
              "CTL: close events still active in the last frame");

  TrainArgs train_args;
  auto* t = app.add_subcommand("train", "Supervised training run");
  add_train_options(t, train_args);

  TrainArgs mt_args;
  auto* m = app.add_subcommand("train-mt", "Mean-teacher training run");
  add_train_options(m, mt_args);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Segment and event F-scores as JSON");
  e->add_option("--ref", eval.ref, "Reference TSV")->required();
  e->add_option("--pred", eval.pred, "Prediction TSV")->required();
  e->add_option("--vocab", eval.vocab, "Vocabulary JSON");
  e->add_option("--duration", eval.duration,
                "Clip length in seconds (default: last event end)");
  e->add_option("--segment", eval.segment, "Segment length in seconds");
  e->add_option("--collar", eval.collar, "Onset collar in seconds");
  e->add_option("--offset-ratio", eval.offset_ratio,
                "Offset tolerance as a fraction of reference duration");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Median F-scores per label config");
  r->add_option("--runs", report.runs, "Run logs")->required();
  r->add_option("--out", report.out, "Also write the table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  if (*c) return run_convert(convert);
  if (*g) return run_gen(gen);
  if (*l) return run_loss(loss);
  if (*t) return run_train(train_args);
  if (*m) return run_train_mt(mt_args);
  if (*e) return run_eval(eval);
  if (*r) return run_report(report);
  return 1;
}

void report_error(const char* kind, const std::string& message) {
  if (log_level() >= LogLevel::kError) {
    std::cerr << Json({{"error", kind}, {"message", message}}).dump() << '\n';
  }
}

}  // namespace
}  // namespace seqaed

int main(int argc, char** argv) {
  using namespace seqaed;
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    report_error("validation", e.what());
    return 2;
  } catch (const ParseError& e) {
    report_error("parse", e.what());
    return 2;
  } catch (const InfeasibleTargetError& e) {
    report_error("infeasible_target", e.what());
    return 2;
  } catch (const Json::exception& e) {
    report_error("validation", e.what());
    return 2;
  } catch (const NumericError& e) {
    report_error("numeric", e.what());
    return 3;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return 3;
  }
}
