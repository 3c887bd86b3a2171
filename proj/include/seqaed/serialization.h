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

// JSON forms of configs, reports, logs and labels, plus model checkpoints.

#ifndef SEQAED_SERIALIZATION_H_
#define SEQAED_SERIALIZATION_H_

#include <string>

#include "json.hpp"
#include "seqaed/datagen.h"
#include "seqaed/labels.h"
#include "seqaed/meanteacher.h"
#include "seqaed/metrics.h"
#include "seqaed/model.h"
#include "seqaed/trainer.h"

namespace seqaed {

using Json = nlohmann::json;

Json vocabulary_to_json(const ClassVocabulary& vocab);
ClassVocabulary vocabulary_from_json(const Json& j);

// Array of "onset:Name" / "offset:Name" strings.
Json sequential_to_json(const SequentialLabel& label,
                        const ClassVocabulary& vocab);
SequentialLabel sequential_from_json(const Json& j,
                                     const ClassVocabulary& vocab);

Json to_json(const GenSpec& spec);
GenSpec gen_spec_from_json(const Json& j, GenSpec defaults = {});

// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
Json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& j, TrainConfig defaults = {});

Json to_json(const MeanTeacherConfig& config);
MeanTeacherConfig mean_teacher_config_from_json(const Json& j,
                                                MeanTeacherConfig defaults = {});

Json to_json(const FScoreReport& report, const ClassVocabulary& vocab);

Json to_json(const EpochLog& log);
Json to_json(const StepLog& log);

const char* seq_kind_name(SeqLossKind kind);
SeqLossKind parse_seq_kind(const std::string& name);

// <path>.bin holds the flat float64 parameters, <path>.json the shape
// manifest.
void save_checkpoint(const std::string& path, const ToyModel& model);
ToyModel load_checkpoint(const std::string& path);

}  // namespace seqaed

#endif  // SEQAED_SERIALIZATION_H_
