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

// Mean-teacher semi-supervised training with a sequential-first schedule.
//
// The teacher is an exponential moving average of the student. Up to the
// schedule half-point the student is trained with sequential (CTL) targets in
// place of strong ones, both for the supervised loss and for the consistency
// loss against the teacher (CTL toward the teacher's decoded boundary
// sequence). Afterwards strong targets and framewise MSE consistency take
// over. Clip-level (weak) supervision and MSE consistency are always on.

#ifndef SEQAED_MEANTEACHER_H_
#define SEQAED_MEANTEACHER_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "seqaed/ctl.h"
#include "seqaed/matrix.h"
#include "seqaed/model.h"
#include "seqaed/trainer.h"

namespace seqaed {

struct TeacherState {
  Vector params;
  double ema_decay = 0.999;
};

// teacher <- decay * teacher + (1 - decay) * student, elementwise.
TeacherState ema_update(const TeacherState& teacher,
                        std::span<const double> student);

struct ConsistencyConfig {
  int rampup_steps = 100;
  double max_weight = 1.0;
  // First step of the strong phase. 0 means strong phase throughout; a
  // negative value means half of the total step count.
  int schedule_half = -1;
};

// max_weight * exp(-5 (1 - min(1, step / rampup_steps))^2).
double rampup_weight(int step, const ConsistencyConfig& config);

enum class Phase { kSequential, kStrong };

const char* phase_name(Phase phase);

struct ConsistencyResult {
  double total = 0.0;
  double weak = 0.0;
  double strong = 0.0;  // framewise MSE, strong phase only
  double seq = 0.0;     // CTL toward the teacher's decoded sequence
  bool seq_skipped = false;
  Matrix d_student;  // gradient w.r.t. the student activity
};

// Always: MSE between max-pooled clip probabilities. Strong phase: framewise
// MSE. Sequential phase: CTL of the student against ctl_decode(teacher),
// skipped when the decoded sequence is empty or infeasible.
ConsistencyResult consistency_losses(const Matrix& student,
                                     const Matrix& teacher, Phase phase,
                                     double decode_threshold,
                                     const CtlOptions& ctl_options = {},
                                     SeqNormalization seq_normalization =
                                         SeqNormalization::kNone);

struct MeanTeacherConfig {
  TrainConfig train;
  double ema_decay = 0.999;
  double teacher_noise = 0.05;
  ConsistencyConfig consistency;
  double seq_decode_threshold = 0.3;
  // Keep the supervised sequential term after the half-point.
  bool supervised_seq_in_strong_phase = true;
  int unlabeled_batch_size = 16;
};

void validate_config(const MeanTeacherConfig& config);

struct StepLog {
  int step = 0;
  int epoch = 0;
  Phase phase = Phase::kSequential;
  double supervised = 0.0;
  double consistency = 0.0;
  double consistency_weak = 0.0;
  double consistency_strong = 0.0;
  double consistency_seq = 0.0;
  double rampup = 0.0;
  int skipped_supervised = 0;
  int skipped_consistency = 0;
};

struct MeanTeacherResult {
  ToyModel teacher;
  ToyModel student;
  std::vector<StepLog> steps;
  std::vector<EpochLog> epochs;  // evaluated on the teacher
};

struct MeanTeacherCallbacks {
  std::function<void(const StepLog&)> on_step;
  std::function<void(const EpochLog&)> on_epoch;
};

// Supervised weights for a phase: the strong term is replaced by the
// sequential one in the sequential phase.
LossWeights phase_weights(const MeanTeacherConfig& config, Phase phase);

MeanTeacherResult train_semisupervised(
    ToyModel model, const Dataset& labeled,
    const std::vector<Matrix>& unlabeled, const MeanTeacherConfig& config,
    const MeanTeacherCallbacks& callbacks = {});

}  // namespace seqaed

#endif  // SEQAED_MEANTEACHER_H_
