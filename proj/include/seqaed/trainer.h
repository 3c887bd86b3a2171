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

// Supervised training of the toy model with any mix of strong (framewise),
// weak (clip-level) and sequential (CTC or CTL) targets.

#ifndef SEQAED_TRAINER_H_
#define SEQAED_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seqaed/ctl.h"
#include "seqaed/labels.h"
#include "seqaed/matrix.h"
#include "seqaed/metrics.h"
#include "seqaed/model.h"

namespace seqaed {

inline constexpr double kProbClip = 1e-7;

enum class SeqLossKind { kCtl, kCtc };

struct LossWeights {
  double strong = 4.0;
  double weak = 2.0;
  double seq = 1.0;

  LossWeights scaled(double factor) const {
    return {strong * factor, weak * factor, seq * factor};
  }
  bool operator==(const LossWeights&) const = default;
};

// Scaling of the sequence term inside the combined loss. The strong and weak
// terms are means, while CTC/CTL are summed log-likelihoods that grow with
// the clip; kTargetLength divides by the number of target symbols.
enum class SeqNormalization { kNone, kTargetLength };

// How predicted events are read out of the model for evaluation.
enum class Readout {
  kAuto,           // CTC boundaries for CTC-only training, else activity
  kActivity,       // threshold + median filter on the sigmoid head
  kCtcBoundaries,  // greedy CTC decoding of the softmax head
};

struct TrainConfig {
  int epochs = 60;
  int batch_size = 8;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 1;
  int hidden = 32;
  int context = 4;  // see ModelShape::context
  LossWeights weights;
  SeqLossKind seq_kind = SeqLossKind::kCtl;
  SeqNormalization seq_normalization = SeqNormalization::kTargetLength;
  bool ctl_close_at_end = true;
  // Rescales the clipped global gradient norm; 0 disables clipping.
  double max_grad_norm = 0.5;
  double decode_threshold = 0.5;
  int median_window = 5;
  Readout readout = Readout::kAuto;
};

void validate_config(const TrainConfig& config);

struct LabeledClip {
  std::string id;
  Matrix features;  // T x F
  std::optional<FrameActivity> strong;
  std::optional<WeakLabel> weak;
  std::optional<SequentialLabel> sequential;
};

struct EvalClip {
  std::string id;
  Matrix features;
  StrongAnnotation reference;
};

struct Dataset {
  int num_classes = 0;
  int num_features = 0;
  double hop_s = 0.0;
  std::vector<LabeledClip> train;
  std::vector<EvalClip> eval;
};

// Mean binary cross-entropy over all T x C cells, y clipped to
// [1e-7, 1 - 1e-7].
LossResult strong_loss(const Matrix& y, const FrameActivity& target);

// Max-pooled clip probability per class, BCE against presence, averaged over
// classes. The gradient reaches only the first argmax frame of each class.
LossResult weak_loss(const Matrix& y, const WeakLabel& target);

struct LabelTargets {
  const FrameActivity* strong = nullptr;
  const WeakLabel* weak = nullptr;
  const SequentialLabel* sequential = nullptr;
};

struct CombinedLoss {
  double total = 0.0;
  double strong = 0.0;  // unweighted term values
  double weak = 0.0;
  double seq = 0.0;
  Matrix d_activity;  // T x C
  Matrix d_boundary;  // T x (2C + 1); empty unless the CTC term is active
};

// w.strong * strong + w.weak * weak + w.seq * (CTC or CTL). Terms whose target
// is absent or whose weight is zero are skipped. The CTC term reads
// `boundary`; everything else reads `activity`.
CombinedLoss combined_loss(const Matrix& activity, const Matrix& boundary,
                           const LabelTargets& targets,
                           const LossWeights& weights, SeqLossKind kind,
                           const CtlOptions& ctl_options = {});

Readout resolve_readout(const TrainConfig& config);

StrongAnnotation predict_events(const ToyModel& model, const Matrix& features,
                                double hop_s, Readout readout,
                                const TrainConfig& config);

struct EvalScores {
  double event_f = 0.0;
  double segment_f = 0.0;
  std::optional<double> peak_cluster;
  std::vector<ClipResult> clips;
};

EvalScores evaluate(const ToyModel& model, const Dataset& data,
                    const TrainConfig& config);

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double strong = 0.0;
  double weak = 0.0;
  double seq = 0.0;
  int clips = 0;
  int skipped = 0;
  double event_f = 0.0;
  double segment_f = 0.0;
};

struct TrainResult {
  ToyModel model;
  std::vector<EpochLog> log;
};

// Gradient of one clip's combined loss w.r.t. the model parameters. Throws
// InfeasibleTargetError when the sequential target cannot be aligned.
struct ClipGradient {
  CombinedLoss loss;
  Vector grad;
};
ClipGradient clip_gradient(const ToyModel& model, const LabeledClip& clip,
                           const LossWeights& weights,
                           const TrainConfig& config);

// SGD with momentum; `velocity` is updated in place.
void sgd_momentum_step(Vector& params, Vector& velocity, Vector grad,
                       const TrainConfig& config);

// Minibatch training, deterministic in config.seed. Clips whose sequential
// target is too long or has zero alignment probability are skipped and
// counted; any other non-finite loss throws NumericError naming the clip and
// term.
TrainResult train(ToyModel model, const Dataset& data,
                  const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace seqaed

#endif  // SEQAED_TRAINER_H_
