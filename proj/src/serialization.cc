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

#include "seqaed/serialization.h"

#include <algorithm>
#include <functional>
#include <map>

#include "seqaed/errors.h"
#include "seqaed/file_util.h"

namespace seqaed {
namespace {

using Setter = std::function<void(const Json&)>;

// Applies `setters` to every key of `j`; unknown keys are a ValidationError.
void apply_keys(const Json& j, const std::map<std::string, Setter>& setters,
                const char* what) {
  if (!j.is_object()) {
    throw ValidationError(std::string(what) + " must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw ValidationError(std::string("unknown ") + what + " key: " + key);
    }
    try {
      it->second(value);
    } catch (const Json::exception& e) {
      throw ValidationError(std::string(what) + " key " + key + ": " +
                            e.what());
    }
  }
}

template <typename T>
Setter set(T& field) {
  return [&field](const Json& v) { field = v.get<T>(); };
}

const char* readout_name(Readout r) {
  switch (r) {
    case Readout::kAuto: return "auto";
    case Readout::kActivity: return "activity";
    case Readout::kCtcBoundaries: return "ctc_boundaries";
  }
  return "auto";
}

const char* seq_normalization_name(SeqNormalization n) {
  return n == SeqNormalization::kTargetLength ? "target_length" : "none";
}
SeqNormalization parse_seq_normalization(const std::string& name) {
  if (name == "none") return SeqNormalization::kNone;
  if (name == "target_length") return SeqNormalization::kTargetLength;
  throw ValidationError("unknown seq_normalization: " + name);
}
Readout parse_readout(const std::string& name) {
  if (name == "auto") return Readout::kAuto;
  if (name == "activity") return Readout::kActivity;
  if (name == "ctc_boundaries") return Readout::kCtcBoundaries;
  throw ValidationError("unknown readout: " + name);
}

Json class_score_json(const ClassScore& s) {
  return {{"tp", s.tp},           {"fp", s.fp},
          {"fn", s.fn},           {"precision", s.precision},
          {"recall", s.recall},   {"f1", s.f1},
          {"defined", s.defined}};
}

}  // namespace

Json vocabulary_to_json(const ClassVocabulary& vocab) { return vocab.names(); }

ClassVocabulary vocabulary_from_json(const Json& j) {
  if (!j.is_array()) {
    throw ValidationError("class vocabulary must be a JSON array of names");
  }
  std::vector<std::string> names;
  for (const auto& n : j) {
    if (!n.is_string()) throw ValidationError("class names must be strings");
    names.push_back(n.get<std::string>());
  }
  return ClassVocabulary(std::move(names));
}

Json sequential_to_json(const SequentialLabel& label,
                        const ClassVocabulary& vocab) {
  Json arr = Json::array();
  for (const auto& s : label) arr.push_back(symbol_to_string(s, vocab));
  return arr;
}

SequentialLabel sequential_from_json(const Json& j,
                                     const ClassVocabulary& vocab) {
  if (!j.is_array()) throw ValidationError("sequential label must be an array");
  SequentialLabel label;
  for (const auto& s : j) {
    if (!s.is_string()) throw ValidationError("boundary symbols are strings");
    label.push_back(parse_symbol(s.get<std::string>(), vocab));
  }
  return label;
}

const char* seq_kind_name(SeqLossKind kind) {
  return kind == SeqLossKind::kCtl ? "ctl" : "ctc";
}

SeqLossKind parse_seq_kind(const std::string& name) {
  if (name == "ctl") return SeqLossKind::kCtl;
  if (name == "ctc") return SeqLossKind::kCtc;
  throw ValidationError("sequence loss must be 'ctl' or 'ctc', got " + name);
}

Json to_json(const GenSpec& s) {
  return {{"classes", s.classes},
          {"features", s.features},
          {"frames", s.frames},
          {"hop_s", s.hop_s},
          {"min_events", s.min_events},
          {"max_events", s.max_events},
          {"min_duration_s", s.min_duration_s},
          {"max_duration_s", s.max_duration_s},
          {"snr_db", s.snr_db},
          {"jitter_frac", s.jitter_frac},
          {"seed", s.seed}};
}

GenSpec gen_spec_from_json(const Json& j, GenSpec s) {
  apply_keys(j,
             {{"classes", set(s.classes)},
              {"features", set(s.features)},
              {"frames", set(s.frames)},
              {"hop_s", set(s.hop_s)},
              {"min_events", set(s.min_events)},
              {"max_events", set(s.max_events)},
              {"min_duration_s", set(s.min_duration_s)},
              {"max_duration_s", set(s.max_duration_s)},
              {"snr_db", set(s.snr_db)},
              {"jitter_frac", set(s.jitter_frac)},
              {"seed", set(s.seed)}},
             "generator spec");
  return s;
}

Json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"seed", c.seed},
          {"hidden", c.hidden},
          {"context", c.context},
          {"weights",
           {{"strong", c.weights.strong},
            {"weak", c.weights.weak},
            {"seq", c.weights.seq}}},
          {"seq_kind", seq_kind_name(c.seq_kind)},
          {"seq_normalization", seq_normalization_name(c.seq_normalization)},
          {"ctl_close_at_end", c.ctl_close_at_end},
          {"max_grad_norm", c.max_grad_norm},
          {"decode_threshold", c.decode_threshold},
          {"median_window", c.median_window},
          {"readout", readout_name(c.readout)}};
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
  apply_keys(
      j,
      {{"epochs", set(c.epochs)},
       {"batch_size", set(c.batch_size)},
       {"learning_rate", set(c.learning_rate)},
       {"momentum", set(c.momentum)},
       {"seed", set(c.seed)},
       {"hidden", set(c.hidden)},
       {"context", set(c.context)},
       {"weights",
        [&](const Json& w) {
          apply_keys(w,
                     {{"strong", set(c.weights.strong)},
                      {"weak", set(c.weights.weak)},
                      {"seq", set(c.weights.seq)}},
                     "loss weight");
        }},
       {"seq_kind",
        [&](const Json& v) { c.seq_kind = parse_seq_kind(v.get<std::string>()); }},
       {"seq_normalization",
        [&](const Json& v) {
          c.seq_normalization = parse_seq_normalization(v.get<std::string>());
        }},
       {"ctl_close_at_end", set(c.ctl_close_at_end)},
       {"max_grad_norm", set(c.max_grad_norm)},
       {"decode_threshold", set(c.decode_threshold)},
       {"median_window", set(c.median_window)},
       {"readout",
        [&](const Json& v) { c.readout = parse_readout(v.get<std::string>()); }}},
      "train config");
  return c;
}

Json to_json(const MeanTeacherConfig& c) {
  Json j = to_json(c.train);
  j["ema_decay"] = c.ema_decay;
  j["teacher_noise"] = c.teacher_noise;
  j["rampup_steps"] = c.consistency.rampup_steps;
  j["max_consistency_weight"] = c.consistency.max_weight;
  j["schedule_half"] = c.consistency.schedule_half;
  j["seq_decode_threshold"] = c.seq_decode_threshold;
  j["supervised_seq_in_strong_phase"] = c.supervised_seq_in_strong_phase;
  j["unlabeled_batch_size"] = c.unlabeled_batch_size;
  return j;
}

MeanTeacherConfig mean_teacher_config_from_json(const Json& j,
                                                MeanTeacherConfig c) {
  if (!j.is_object()) {
    throw ValidationError("mean-teacher config must be a JSON object");
  }
  Json train_part = Json::object();
  Json mt_part = Json::object();
  static const char* const kMtKeys[] = {
      "ema_decay",     "teacher_noise",        "rampup_steps",
      "max_consistency_weight", "schedule_half", "seq_decode_threshold",
      "supervised_seq_in_strong_phase", "unlabeled_batch_size"};
  for (const auto& [key, value] : j.items()) {
    const bool is_mt = std::find(std::begin(kMtKeys), std::end(kMtKeys), key) !=
                       std::end(kMtKeys);
    (is_mt ? mt_part : train_part)[key] = value;
  }
  c.train = train_config_from_json(train_part, c.train);
  apply_keys(mt_part,
             {{"ema_decay", set(c.ema_decay)},
              {"teacher_noise", set(c.teacher_noise)},
              {"rampup_steps", set(c.consistency.rampup_steps)},
              {"max_consistency_weight", set(c.consistency.max_weight)},
              {"schedule_half", set(c.consistency.schedule_half)},
              {"seq_decode_threshold", set(c.seq_decode_threshold)},
              {"supervised_seq_in_strong_phase",
               set(c.supervised_seq_in_strong_phase)},
              {"unlabeled_batch_size", set(c.unlabeled_batch_size)}},
             "mean-teacher config");
  return c;
}

Json to_json(const FScoreReport& report, const ClassVocabulary& vocab) {
  Json classes = Json::object();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    classes[vocab.name(static_cast<int>(c))] =
        class_score_json(report.per_class[c]);
  }
  return {{"classes", classes}, {"macro_f1", report.macro_f1}};
}

Json to_json(const EpochLog& log) {
  return {{"type", "epoch"},         {"epoch", log.epoch},
          {"loss", log.loss},        {"loss_strong", log.strong},
          {"loss_weak", log.weak},   {"loss_seq", log.seq},
          {"clips", log.clips},      {"skipped", log.skipped},
          {"event_f", log.event_f},  {"segment_f", log.segment_f}};
}

Json to_json(const StepLog& log) {
  return {{"type", "step"},
          {"step", log.step},
          {"epoch", log.epoch},
          {"phase", phase_name(log.phase)},
          {"supervised", log.supervised},
          {"consistency", log.consistency},
          {"consistency_weak", log.consistency_weak},
          {"consistency_strong", log.consistency_strong},
          {"consistency_seq", log.consistency_seq},
          {"rampup", log.rampup},
          {"skipped_supervised", log.skipped_supervised},
          {"skipped_consistency", log.skipped_consistency}};
}

void save_checkpoint(const std::string& path, const ToyModel& model) {
  Json blocks = Json::array();
  for (const auto& b : model.blocks()) {
    blocks.push_back({{"name", b.name},
                      {"shape", {b.rows, b.cols}},
                      {"offset", b.offset}});
  }
  const auto& s = model.shape();
  Json manifest = {{"features", s.features},
                   {"hidden", s.hidden},
                   {"classes", s.classes},
                   {"context", s.context},
                   {"num_params", model.num_params()},
                   {"dtype", "float64-le"},
                   {"blocks", blocks}};
  write_doubles(path + ".bin", std::span<const double>(model.params().data(),
                                                       model.params().size()));
  atomic_write(path + ".json", manifest.dump(2) + "\n");
}

ToyModel load_checkpoint(const std::string& path) {
  Json manifest;
  try {
    manifest = Json::parse(read_file(path + ".json"));
  } catch (const Json::exception& e) {
    throw ParseError(path + ".json: " + e.what(), 0);
  }
  ModelShape shape;
  shape.features = manifest.at("features").get<int>();
  shape.hidden = manifest.at("hidden").get<int>();
  shape.classes = manifest.at("classes").get<int>();
  shape.context = manifest.value("context", 0);
  const auto values = read_doubles(path + ".bin");
  return ToyModel(shape, Eigen::Map<const Vector>(
                             values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace seqaed
