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

#include "seqaed/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "seqaed/ctc.h"
#include "seqaed/errors.h"

namespace seqaed {
namespace {

double clip_prob(double y) { return std::clamp(y, kProbClip, 1.0 - kProbClip); }

double bce(double y, double target) {
  const double p = clip_prob(y);
  return -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
}

double bce_grad(double y, double target) {
  const double p = clip_prob(y);
  return -target / p + (1.0 - target) / (1.0 - p);
}

void check_finite(double value, const std::string& clip, const char* term) {
  if (!std::isfinite(value)) {
    throw NumericError("non-finite " + std::string(term) + " loss on clip " +
                       clip);
  }
}

}  // namespace

void validate_config(const TrainConfig& c) {
  if (c.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (c.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(c.learning_rate >= 0.0)) {
    throw ValidationError("learning_rate must be >= 0");
  }
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) {
    throw ValidationError("momentum must lie in [0, 1)");
  }
  if (c.hidden < 1) throw ValidationError("hidden must be >= 1");
  if (c.context < 0) throw ValidationError("context must be >= 0");
  const auto& w = c.weights;
  if (w.strong < 0.0 || w.weak < 0.0 || w.seq < 0.0) {
    throw ValidationError("loss weights must be non-negative");
  }
  if (w.strong == 0.0 && w.weak == 0.0 && w.seq == 0.0) {
    throw ValidationError("loss weights must not all be zero");
  }
  if (!(c.max_grad_norm >= 0.0)) {
    throw ValidationError("max_grad_norm must be >= 0");
  }
  if (!(c.decode_threshold > 0.0 && c.decode_threshold < 1.0)) {
    throw ValidationError("decode_threshold must lie in (0, 1)");
  }
  if (c.median_window < 1 || c.median_window % 2 == 0) {
    throw ValidationError("median_window must be a positive odd number");
  }
}

LossResult strong_loss(const Matrix& y, const FrameActivity& target) {
  if (y.rows() != target.grid.rows() || y.cols() != target.grid.cols()) {
    throw ValidationError("strong_loss: shape mismatch");
  }
  const double cells = static_cast<double>(y.size());
  LossResult r;
  r.grad.resize(y.rows(), y.cols());
  for (Eigen::Index t = 0; t < y.rows(); ++t) {
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      r.loss += bce(y(t, c), target.grid(t, c));
      r.grad(t, c) = bce_grad(y(t, c), target.grid(t, c)) / cells;
    }
  }
  r.loss /= cells;
  return r;
}

LossResult weak_loss(const Matrix& y, const WeakLabel& target) {
  const int classes = static_cast<int>(y.cols());
  LossResult r;
  r.grad = Matrix::Zero(y.rows(), y.cols());
  if (y.rows() == 0) throw ValidationError("weak_loss: empty posteriorgram");
  for (int c = 0; c < classes; ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index t = 1; t < y.rows(); ++t) {
      if (y(t, c) > y(arg, c)) arg = t;
    }
    const double present = target.contains(c) ? 1.0 : 0.0;
    r.loss += bce(y(arg, c), present);
    r.grad(arg, c) = bce_grad(y(arg, c), present) / classes;
  }
  r.loss /= classes;
  return r;
}

CombinedLoss combined_loss(const Matrix& activity, const Matrix& boundary,
                           const LabelTargets& targets,
                           const LossWeights& weights, SeqLossKind kind,
                           const CtlOptions& ctl_options) {
  CombinedLoss out;
  out.d_activity = Matrix::Zero(activity.rows(), activity.cols());
  if (targets.strong && weights.strong != 0.0) {
    auto r = strong_loss(activity, *targets.strong);
    out.strong = r.loss;
    out.total += weights.strong * r.loss;
    out.d_activity += weights.strong * r.grad;
  }
  if (targets.weak && weights.weak != 0.0) {
    auto r = weak_loss(activity, *targets.weak);
    out.weak = r.loss;
    out.total += weights.weak * r.loss;
    out.d_activity += weights.weak * r.grad;
  }
  if (targets.sequential && weights.seq != 0.0) {
    if (kind == SeqLossKind::kCtl) {
      auto r = ctl_loss(activity, *targets.sequential, ctl_options);
      out.seq = r.loss;
      out.d_activity += weights.seq * r.grad;
    } else {
      // Model outputs are softmax rows; skip the row-sum check.
      auto r = ctc_loss(boundary, *targets.sequential,
                        CtcOptions{.require_stochastic = false});
      out.seq = r.loss;
      out.d_boundary = weights.seq * r.grad;
    }
    out.total += weights.seq * out.seq;
  }
  return out;
}

Readout resolve_readout(const TrainConfig& config) {
  if (config.readout != Readout::kAuto) return config.readout;
  const auto& w = config.weights;
  if (config.seq_kind == SeqLossKind::kCtc && w.strong == 0.0 &&
      w.weak == 0.0) {
    return Readout::kCtcBoundaries;
  }
  return Readout::kActivity;
}

StrongAnnotation predict_events(const ToyModel& model, const Matrix& features,
                                double hop_s, Readout readout,
                                const TrainConfig& config) {
  if (readout == Readout::kAuto) readout = resolve_readout(config);
  const bool boundary = readout == Readout::kCtcBoundaries;
  const auto out = model.forward(features, boundary);
  if (boundary) {
    const auto symbols = ctc_greedy_decode_aligned(out.boundary);
    return boundaries_to_events(symbols, model.shape().classes,
                                static_cast<int>(features.rows()), hop_s);
  }
  return posteriors_to_events({out.activity, hop_s}, config.decode_threshold,
                              config.median_window);
}

EvalScores evaluate(const ToyModel& model, const Dataset& data,
                    const TrainConfig& config) {
  EvalScores scores;
  const Readout readout = resolve_readout(config);
  scores.clips.reserve(data.eval.size());
  for (const auto& clip : data.eval) {
    ClipResult r;
    r.clip_id = clip.id;
    r.duration_s = clip.features.rows() * data.hop_s;
    r.reference = clip.reference;
    r.prediction =
        predict_events(model, clip.features, data.hop_s, readout, config);
    scores.clips.push_back(std::move(r));
  }
  scores.event_f = event_fscore(scores.clips, data.num_classes).macro_f1;
  scores.segment_f = segment_fscore(scores.clips, data.num_classes).macro_f1;
  scores.peak_cluster = peak_cluster_score(scores.clips);
  return scores;
}

ClipGradient clip_gradient(const ToyModel& model, const LabeledClip& clip,
                           const LossWeights& weights,
                           const TrainConfig& config) {
  const bool ctc = config.seq_kind == SeqLossKind::kCtc && weights.seq != 0.0 &&
                   clip.sequential.has_value();
  const auto out = model.forward(clip.features, ctc);
  if (!out.activity.allFinite() || !out.boundary.allFinite()) {
    throw NumericError("non-finite model output on clip " + clip.id);
  }
  LabelTargets targets;
  if (clip.strong) targets.strong = &*clip.strong;
  if (clip.weak) targets.weak = &*clip.weak;
  if (clip.sequential) targets.sequential = &*clip.sequential;
  LossWeights w = weights;
  if (config.seq_normalization == SeqNormalization::kTargetLength &&
      clip.sequential && !clip.sequential->empty()) {
    w.seq /= static_cast<double>(clip.sequential->size());
  }
  ClipGradient g;
  g.loss = combined_loss(out.activity, out.boundary, targets, w,
                         config.seq_kind,
                         CtlOptions{.close_at_end = config.ctl_close_at_end});
  // Zero alignment probability: the outputs cannot produce this boundary
  // order at all, which the loop treats like a target that is too long.
  if (g.loss.seq == std::numeric_limits<double>::infinity()) {
    throw InfeasibleTargetError(
        "unreachable sequential target on clip " + clip.id,
        static_cast<int>(clip.features.rows()),
        static_cast<int>(clip.sequential->size()));
  }
  check_finite(g.loss.strong, clip.id, "strong");
  check_finite(g.loss.weak, clip.id, "weak");
  check_finite(g.loss.seq, clip.id,
               config.seq_kind == SeqLossKind::kCtl ? "CTL" : "CTC");
  g.grad = model.backward(clip.features, out, g.loss.d_activity,
                          g.loss.d_boundary);
  if (!g.grad.allFinite()) {
    throw NumericError("non-finite gradient on clip " + clip.id);
  }
  return g;
}

void sgd_momentum_step(Vector& params, Vector& velocity, Vector grad,
                       const TrainConfig& config) {
  if (config.max_grad_norm > 0.0) {
    const double norm = grad.norm();
    if (norm > config.max_grad_norm) grad *= config.max_grad_norm / norm;
  }
  velocity = config.momentum * velocity - config.learning_rate * grad;
  params += velocity;
}

TrainResult train(ToyModel model, const Dataset& data,
                  const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  validate_config(config);
  if (data.train.empty()) throw ValidationError("training set is empty");
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);
  Vector velocity = Vector::Zero(model.num_params());
  TrainResult result{std::move(model), {}};
  ToyModel& m = result.model;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochLog log;
    log.epoch = epoch;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(
                                             config.batch_size));
      Vector batch_grad = Vector::Zero(m.num_params());
      int used = 0;
      for (std::size_t i = start; i < end; ++i) {
        const LabeledClip& clip = data.train[order[i]];
        ClipGradient g;
        try {
          g = clip_gradient(m, clip, config.weights, config);
        } catch (const InfeasibleTargetError&) {
          ++log.skipped;
          continue;
        }
        batch_grad += g.grad;
        log.loss += g.loss.total;
        log.strong += g.loss.strong;
        log.weak += g.loss.weak;
        log.seq += g.loss.seq;
        ++used;
      }
      if (used == 0) continue;
      log.clips += used;
      sgd_momentum_step(m.params(), velocity, batch_grad / used, config);
    }
    if (log.clips > 0) {
      log.loss /= log.clips;
      log.strong /= log.clips;
      log.weak /= log.clips;
      log.seq /= log.clips;
    }
    if (!data.eval.empty()) {
      const auto scores = evaluate(m, data, config);
      log.event_f = scores.event_f;
      log.segment_f = scores.segment_f;
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

}  // namespace seqaed
