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

#include "seqaed/meanteacher.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "seqaed/errors.h"

namespace seqaed {
namespace {

// Separate streams so that teacher noise and unlabeled sampling never shift
// the labeled shuffling sequence.
constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kUnlabeledStream = 0xbf58476d1ce4e5b9ULL;

// Pooled clip probabilities and the first argmax frame of each class.
std::pair<RowVector, std::vector<Eigen::Index>> max_pool(const Matrix& y) {
  RowVector pooled(y.cols());
  std::vector<Eigen::Index> arg(y.cols(), 0);
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    for (Eigen::Index t = 1; t < y.rows(); ++t) {
      if (y(t, c) > y(arg[c], c)) arg[c] = t;
    }
    pooled(c) = y(arg[c], c);
  }
  return {pooled, arg};
}

}  // namespace

TeacherState ema_update(const TeacherState& teacher,
                        std::span<const double> student) {
  if (static_cast<std::size_t>(teacher.params.size()) != student.size()) {
    throw ValidationError("ema_update: teacher has " +
                          std::to_string(teacher.params.size()) +
                          " parameters, student " +
                          std::to_string(student.size()));
  }
  const double a = teacher.ema_decay;
  TeacherState next = teacher;
  for (Eigen::Index i = 0; i < next.params.size(); ++i) {
    next.params[i] = a * teacher.params[i] + (1.0 - a) * student[i];
  }
  return next;
}

double rampup_weight(int step, const ConsistencyConfig& config) {
  if (config.rampup_steps < 1) {
    throw ValidationError("rampup_steps must be >= 1");
  }
  const double progress =
      std::min(1.0, static_cast<double>(std::max(step, 0)) /
                        config.rampup_steps);
  const double phase = 1.0 - progress;
  return config.max_weight * std::exp(-5.0 * phase * phase);
}

const char* phase_name(Phase phase) {
  return phase == Phase::kSequential ? "sequential" : "strong";
}

ConsistencyResult consistency_losses(const Matrix& student,
                                     const Matrix& teacher, Phase phase,
                                     double decode_threshold,
                                     const CtlOptions& ctl_options,
                                     SeqNormalization seq_normalization) {
  if (student.rows() != teacher.rows() || student.cols() != teacher.cols()) {
    throw ValidationError("consistency_losses: shape mismatch");
  }
  const auto classes = static_cast<double>(student.cols());
  ConsistencyResult r;
  r.d_student = Matrix::Zero(student.rows(), student.cols());

  const auto [s_pool, s_arg] = max_pool(student);
  const auto [t_pool, t_arg] = max_pool(teacher);
  for (Eigen::Index c = 0; c < student.cols(); ++c) {
    const double diff = s_pool(c) - t_pool(c);
    r.weak += diff * diff / classes;
    r.d_student(s_arg[c], c) += 2.0 * diff / classes;
  }

  if (phase == Phase::kStrong) {
    const auto cells = static_cast<double>(student.size());
    const Matrix diff = student - teacher;
    r.strong = diff.squaredNorm() / cells;
    r.d_student += 2.0 * diff / cells;
  } else {
    const SequentialLabel target =
        ctl_decode(teacher, decode_threshold, ctl_options);
    if (target.empty()) {
      r.seq_skipped = true;
    } else {
      try {
        auto ctl = ctl_loss(student, target, ctl_options);
        if (std::isinf(ctl.loss)) {
          r.seq_skipped = true;
        } else {
          const double scale =
              seq_normalization == SeqNormalization::kTargetLength
                  ? 1.0 / static_cast<double>(target.size())
                  : 1.0;
          r.seq = scale * ctl.loss;
          r.d_student += scale * ctl.grad;
        }
      } catch (const InfeasibleTargetError&) {
        r.seq_skipped = true;
      }
    }
  }
  r.total = r.weak + r.strong + r.seq;
  return r;
}

void validate_config(const MeanTeacherConfig& config) {
  validate_config(config.train);
  if (!(config.ema_decay >= 0.0 && config.ema_decay <= 1.0)) {
    throw ValidationError("ema_decay must lie in [0, 1]");
  }
  if (!(config.teacher_noise >= 0.0)) {
    throw ValidationError("teacher_noise must be >= 0");
  }
  if (config.consistency.rampup_steps < 1) {
    throw ValidationError("rampup_steps must be >= 1");
  }
  if (!(config.consistency.max_weight >= 0.0)) {
    throw ValidationError("max consistency weight must be >= 0");
  }
  if (!(config.seq_decode_threshold > 0.0 &&
        config.seq_decode_threshold < 1.0)) {
    throw ValidationError("seq_decode_threshold must lie in (0, 1)");
  }
  if (config.unlabeled_batch_size < 0) {
    throw ValidationError("unlabeled_batch_size must be >= 0");
  }
  if (config.train.seq_kind != SeqLossKind::kCtl) {
    throw ValidationError("mean-teacher training uses the CTL sequence loss");
  }
}

LossWeights phase_weights(const MeanTeacherConfig& config, Phase phase) {
  const LossWeights& w = config.train.weights;
  if (phase == Phase::kSequential) return {0.0, w.weak, w.seq};
  return {w.strong, w.weak, config.supervised_seq_in_strong_phase ? w.seq : 0.0};
}

MeanTeacherResult train_semisupervised(ToyModel model, const Dataset& labeled,
                                       const std::vector<Matrix>& unlabeled,
                                       const MeanTeacherConfig& config,
                                       const MeanTeacherCallbacks& callbacks) {
  validate_config(config);
  const TrainConfig& tc = config.train;
  if (labeled.train.empty()) throw ValidationError("labeled set is empty");

  const int batches_per_epoch = static_cast<int>(
      (labeled.train.size() + tc.batch_size - 1) / tc.batch_size);
  const int total_steps = batches_per_epoch * tc.epochs;
  const int half = config.consistency.schedule_half < 0
                       ? total_steps / 2
                       : config.consistency.schedule_half;
  const CtlOptions ctl_options{.close_at_end = tc.ctl_close_at_end};

  std::mt19937_64 rng(tc.seed);
  std::mt19937_64 noise_rng(tc.seed ^ kNoiseStream);
  std::mt19937_64 unlabeled_rng(tc.seed ^ kUnlabeledStream);
  std::normal_distribution<double> noise(0.0, config.teacher_noise);

  std::vector<std::size_t> order(labeled.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> unlabeled_order(unlabeled.size());
  std::iota(unlabeled_order.begin(), unlabeled_order.end(), 0);
  std::size_t unlabeled_pos = unlabeled.size();
  auto next_unlabeled = [&]() -> const Matrix& {
    if (unlabeled_pos >= unlabeled.size()) {
      std::shuffle(unlabeled_order.begin(), unlabeled_order.end(),
                   unlabeled_rng);
      unlabeled_pos = 0;
    }
    return unlabeled[unlabeled_order[unlabeled_pos++]];
  };

  MeanTeacherResult result{model, model, {}, {}};
  ToyModel& student = result.student;
  TeacherState teacher{model.params(), config.ema_decay};
  Vector velocity = Vector::Zero(student.num_params());
  int step = 0;

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochLog elog;
    elog.epoch = epoch;
    for (std::size_t start = 0; start < order.size();
         start += tc.batch_size) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(tc.batch_size));
      StepLog slog;
      slog.step = step;
      slog.epoch = epoch;
      slog.phase = step < half ? Phase::kSequential : Phase::kStrong;
      const LossWeights weights = phase_weights(config, slog.phase);

      Vector sup_grad = Vector::Zero(student.num_params());
      int used = 0;
      for (std::size_t i = start; i < end; ++i) {
        const LabeledClip& clip = labeled.train[order[i]];
        ClipGradient g;
        try {
          g = clip_gradient(student, clip, weights, tc);
        } catch (const InfeasibleTargetError&) {
          ++slog.skipped_supervised;
          continue;
        } catch (const NumericError& e) {
          throw NumericError("step " + std::to_string(step) + " (" +
                             phase_name(slog.phase) + " phase): " + e.what());
        }
        sup_grad += g.grad;
        slog.supervised += g.loss.total;
        elog.loss += g.loss.total;
        elog.strong += g.loss.strong;
        elog.weak += g.loss.weak;
        elog.seq += g.loss.seq;
        ++used;
      }
      elog.skipped += slog.skipped_supervised;
      Vector grad = Vector::Zero(student.num_params());
      if (used > 0) {
        grad = sup_grad / used;
        elog.clips += used;
        slog.supervised /= used;
      }

      slog.rampup = rampup_weight(step, config.consistency);
      if (slog.rampup > 0.0) {
        std::vector<const Matrix*> batch;
        for (std::size_t i = start; i < end; ++i) {
          batch.push_back(&labeled.train[order[i]].features);
        }
        for (int i = 0; i < config.unlabeled_batch_size && !unlabeled.empty();
             ++i) {
          batch.push_back(&next_unlabeled());
        }
        const ToyModel teacher_model(student.shape(), teacher.params);
        Vector cons_grad = Vector::Zero(student.num_params());
        for (const Matrix* x : batch) {
          Matrix noisy = *x;
          if (config.teacher_noise > 0.0) {
            for (Eigen::Index k = 0; k < noisy.size(); ++k) {
              noisy.data()[k] += noise(noise_rng);
            }
          }
          const auto t_out = teacher_model.forward(noisy, false);
          const auto s_out = student.forward(*x, false);
          const auto c = consistency_losses(s_out.activity, t_out.activity,
                                            slog.phase,
                                            config.seq_decode_threshold,
                                            ctl_options, tc.seq_normalization);
          if (!std::isfinite(c.total)) {
            throw NumericError("step " + std::to_string(step) +
                               ": non-finite consistency loss (" +
                               phase_name(slog.phase) + " phase)");
          }
          slog.consistency_weak += c.weak;
          slog.consistency_strong += c.strong;
          slog.consistency_seq += c.seq;
          if (c.seq_skipped) ++slog.skipped_consistency;
          cons_grad += student.backward(*x, s_out, c.d_student, Matrix());
        }
        const double n = static_cast<double>(batch.size());
        slog.consistency_weak /= n;
        slog.consistency_strong /= n;
        slog.consistency_seq /= n;
        slog.consistency = slog.consistency_weak + slog.consistency_strong +
                           slog.consistency_seq;
        grad += slog.rampup * cons_grad / n;
      }
      if (!grad.allFinite()) {
        throw NumericError("step " + std::to_string(step) +
                           ": non-finite gradient");
      }

      sgd_momentum_step(student.params(), velocity, grad, tc);
      // Early steps average uniformly over the student history.
      teacher.ema_decay =
          std::min(config.ema_decay, 1.0 - 1.0 / (step + 1.0));
      teacher = ema_update(teacher, std::span<const double>(
                                        student.params().data(),
                                        student.params().size()));
      result.steps.push_back(slog);
      if (callbacks.on_step) callbacks.on_step(slog);
      ++step;
    }
    if (elog.clips > 0) {
      elog.loss /= elog.clips;
      elog.strong /= elog.clips;
      elog.weak /= elog.clips;
      elog.seq /= elog.clips;
    }
    result.teacher = ToyModel(student.shape(), teacher.params);
    if (!labeled.eval.empty()) {
      const auto scores = evaluate(result.teacher, labeled, tc);
      elog.event_f = scores.event_f;
      elog.segment_f = scores.segment_f;
    }
    result.epochs.push_back(elog);
    if (callbacks.on_epoch) callbacks.on_epoch(elog);
  }
  result.teacher = ToyModel(student.shape(), teacher.params);
  return result;
}

}  // namespace seqaed
