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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "seqaed/ctl.h"
#include "seqaed/errors.h"

namespace seqaed {
namespace {

Matrix column(std::initializer_list<double> values) {
  Matrix m(static_cast<int>(values.size()), 1);
  int i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

Dataset small_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  std::uniform_int_distribution<int> start(1, 6);
  Dataset d{2, 3, 0.1, {}, {}};
  auto make = [&](Matrix& x, StrongAnnotation& ann) {
    x = Matrix(12, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    for (int c = 0; c < 2; ++c) {
      const int s = start(rng);
      ann.events.push_back({c, s * 0.1, (s + 4) * 0.1});
      for (int t = s; t < s + 4; ++t) x(t, c) += 2.0;
    }
  };
  for (int i = 0; i < 12; ++i) {
    LabeledClip clip;
    clip.id = "l" + std::to_string(i);
    StrongAnnotation ann;
    make(clip.features, ann);
    clip.strong = rasterize(ann, 2, 12, 0.1).activity;
    clip.weak = strong_to_weak(ann, 2);
    clip.sequential = strong_to_sequential(ann, 2);
    d.train.push_back(std::move(clip));
  }
  for (int i = 0; i < 4; ++i) {
    EvalClip clip;
    clip.id = "e" + std::to_string(i);
    make(clip.features, clip.reference);
    d.eval.push_back(std::move(clip));
  }
  return d;
}

std::vector<Matrix> unlabeled_features(int count, std::uint64_t seed) {
  Dataset d = small_dataset(seed);
  std::vector<Matrix> out;
  for (int i = 0; i < count; ++i) out.push_back(d.train[i % 12].features);
  return out;
}

MeanTeacherConfig small_config() {
  MeanTeacherConfig c;
  c.train.epochs = 4;
  c.train.batch_size = 4;
  c.train.hidden = 6;
  c.train.learning_rate = 0.05;
  c.consistency.rampup_steps = 5;
  c.unlabeled_batch_size = 4;
  c.ema_decay = 0.9;
  return c;
}

TEST(EmaUpdateTest, Examples) {
  const std::vector<double> student = {4.0, -1.0};
  TeacherState t{Vector::Constant(2, 2.0), 0.0};
  EXPECT_EQ(ema_update(t, student).params, Vector::Map(student.data(), 2));
  t.ema_decay = 1.0;
  EXPECT_EQ(ema_update(t, student).params, t.params);
  t.ema_decay = 0.5;
  EXPECT_EQ(ema_update(t, student).params[0], 3.0);
}

TEST(EmaUpdateTest, ShapeMismatchThrows) {
  const TeacherState t{Vector::Zero(3), 0.5};
  const std::vector<double> student = {1.0, 2.0};
  EXPECT_THROW(ema_update(t, student), ValidationError);
}

TEST(EmaUpdateTest, ContractsTowardStudent) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double alpha : {0.1, 0.5, 0.9, 0.999}) {
    TeacherState t{Vector(20), alpha};
    std::vector<double> s(20);
    for (int i = 0; i < 20; ++i) {
      t.params[i] = n(rng);
      s[i] = n(rng);
    }
    const TeacherState next = ema_update(t, s);
    for (int i = 0; i < 20; ++i) {
      EXPECT_NEAR(std::abs(next.params[i] - s[i]),
                  alpha * std::abs(t.params[i] - s[i]), 1e-12);
    }
  }
}

TEST(RampupTest, Examples) {
  ConsistencyConfig c;
  c.rampup_steps = 100;
  c.max_weight = 2.0;
  EXPECT_NEAR(rampup_weight(0, c), 2.0 * std::exp(-5.0), 1e-15);
  EXPECT_NEAR(rampup_weight(50, c), 2.0 * std::exp(-1.25), 1e-15);
  EXPECT_EQ(rampup_weight(100, c), 2.0);
  EXPECT_EQ(rampup_weight(1000, c), 2.0);
}

TEST(RampupTest, NonDecreasing) {
  ConsistencyConfig c;
  c.rampup_steps = 37;
  double prev = 0.0;
  for (int s = 0; s < 100; ++s) {
    const double w = rampup_weight(s, c);
    EXPECT_GE(w, prev);
    prev = w;
  }
}

TEST(ConsistencyTest, IdenticalOutputsGiveZero) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix y(8, 3);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = u(rng);
  const auto r = consistency_losses(y, y, Phase::kStrong, 0.3);
  EXPECT_EQ(r.total, 0.0);
  EXPECT_TRUE(r.d_student.isZero());
}

TEST(ConsistencyTest, EmptyDecodeSkipsSequentialTerm) {
  const Matrix teacher = column({0.1, 0.2, 0.25});
  const Matrix student = column({0.3, 0.1, 0.2});
  const auto r = consistency_losses(student, teacher, Phase::kSequential, 0.3);
  EXPECT_TRUE(r.seq_skipped);
  EXPECT_EQ(r.seq, 0.0);
  EXPECT_NEAR(r.weak, 0.05 * 0.05, 1e-15);
}

TEST(ConsistencyTest, TwoFrameHandComputedValues) {
  const Matrix student = column({0.2, 0.6});
  const Matrix teacher = column({0.1, 0.7});
  // Teacher onsets are 0.1 and 0.6, so it decodes to [onset] at frame 1.
  // Student onsets 0.2 and 0.4: P = 0.2 * 0.6 + 0.8 * 0.4 = 0.44.
  const auto seq = consistency_losses(student, teacher, Phase::kSequential, 0.3);
  EXPECT_FALSE(seq.seq_skipped);
  EXPECT_NEAR(seq.weak, 0.01, 1e-12);
  EXPECT_NEAR(seq.seq, -std::log(0.44), 1e-12);
  EXPECT_NEAR(seq.total, 0.01 - std::log(0.44), 1e-10);

  const auto strong = consistency_losses(student, teacher, Phase::kStrong, 0.3);
  EXPECT_NEAR(strong.strong, 0.01, 1e-12);
  EXPECT_NEAR(strong.total, 0.02, 1e-10);
}

TEST(ConsistencyTest, TargetLengthNormalizationScalesSequentialTerm) {
  const Matrix student = column({0.1, 0.6, 0.5, 0.1});
  const Matrix teacher = column({0.0, 0.9, 0.9, 0.0});
  const CtlOptions opts{.close_at_end = true};
  const auto raw = consistency_losses(student, teacher, Phase::kSequential,
                                      0.3, opts, SeqNormalization::kNone);
  const auto norm = consistency_losses(student, teacher, Phase::kSequential,
                                       0.3, opts, SeqNormalization::kTargetLength);
  // Teacher decodes to [onset, offset].
  ASSERT_FALSE(raw.seq_skipped);
  EXPECT_DOUBLE_EQ(norm.seq, raw.seq / 2.0);
  EXPECT_EQ(norm.weak, raw.weak);
  const SequentialLabel target = ctl_decode(teacher, 0.3, opts);
  const Matrix weak_grad =
      raw.d_student - ctl_loss(student, target, opts).grad;
  EXPECT_TRUE(norm.d_student.isApprox(
      weak_grad + 0.5 * (raw.d_student - weak_grad), 1e-12));
}

TEST(ConsistencyTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Matrix student(6, 2), teacher(6, 2);
  for (Eigen::Index i = 0; i < student.size(); ++i) {
    student.data()[i] = u(rng);
    teacher.data()[i] = u(rng);
  }
  teacher(2, 0) = 0.95;  // make sure something decodes
  for (Phase phase : {Phase::kSequential, Phase::kStrong}) {
    const auto r = consistency_losses(student, teacher, phase, 0.3);
    if (r.seq_skipped) continue;
    const double h = 1e-7;
    for (Eigen::Index i = 0; i < student.size(); ++i) {
      Matrix up = student, down = student;
      up.data()[i] += h;
      down.data()[i] -= h;
      const double fd =
          (consistency_losses(up, teacher, phase, 0.3).total -
           consistency_losses(down, teacher, phase, 0.3).total) /
          (2 * h);
      EXPECT_NEAR(r.d_student.data()[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(PhaseWeightsTest, SequentialPhaseReplacesStrongTerm) {
  MeanTeacherConfig c;
  c.train.weights = {4, 2, 1};
  EXPECT_EQ(phase_weights(c, Phase::kSequential), (LossWeights{0, 2, 1}));
  EXPECT_EQ(phase_weights(c, Phase::kStrong), (LossWeights{4, 2, 1}));
  c.supervised_seq_in_strong_phase = false;
  EXPECT_EQ(phase_weights(c, Phase::kStrong), (LossWeights{4, 2, 0}));
}

TEST(SemisupervisedTest, DegeneratesToSupervisedTraining) {
  const Dataset d = small_dataset(4);
  MeanTeacherConfig c = small_config();
  c.consistency.max_weight = 0.0;
  c.consistency.schedule_half = 0;
  const auto mt = train_semisupervised(ToyModel({3, 6, 2}, 7), d, {}, c);
  const auto sup = train(ToyModel({3, 6, 2}, 7), d, c.train);
  EXPECT_EQ(mt.student.params(), sup.model.params());
  ASSERT_EQ(mt.epochs.size(), sup.log.size());
  for (size_t i = 0; i < sup.log.size(); ++i) {
    EXPECT_EQ(mt.epochs[i].loss, sup.log[i].loss);
    EXPECT_EQ(mt.epochs[i].strong, sup.log[i].strong);
    EXPECT_EQ(mt.epochs[i].seq, sup.log[i].seq);
    EXPECT_EQ(mt.epochs[i].clips, sup.log[i].clips);
  }
}

TEST(SemisupervisedTest, ZeroHalfPointIsStrongThroughout) {
  MeanTeacherConfig c = small_config();
  c.consistency.schedule_half = 0;
  const auto r = train_semisupervised(ToyModel({3, 6, 2}, 8), small_dataset(5),
                                      unlabeled_features(10, 6), c);
  ASSERT_FALSE(r.steps.empty());
  for (const StepLog& s : r.steps) EXPECT_EQ(s.phase, Phase::kStrong);
}

TEST(SemisupervisedTest, PhaseSwitchesOnceAtHalf) {
  MeanTeacherConfig c = small_config();
  const auto r = train_semisupervised(ToyModel({3, 6, 2}, 9), small_dataset(6),
                                      unlabeled_features(10, 7), c);
  const int total = static_cast<int>(r.steps.size());
  ASSERT_EQ(total, 4 * 3);
  int switches = 0;
  for (int i = 0; i < total; ++i) {
    EXPECT_EQ(r.steps[i].step, i);
    EXPECT_EQ(r.steps[i].phase,
              i < total / 2 ? Phase::kSequential : Phase::kStrong);
    if (i > 0 && r.steps[i].phase != r.steps[i - 1].phase) ++switches;
  }
  EXPECT_EQ(switches, 1);
  for (const StepLog& s : r.steps) {
    EXPECT_TRUE(std::isfinite(s.consistency));
    EXPECT_GE(s.consistency, 0.0);
    if (s.phase == Phase::kStrong) {
      EXPECT_EQ(s.consistency_seq, 0.0);
    } else {
      EXPECT_EQ(s.consistency_strong, 0.0);
    }
  }
}

TEST(SemisupervisedTest, Deterministic) {
  const MeanTeacherConfig c = small_config();
  const auto a = train_semisupervised(ToyModel({3, 6, 2}, 10), small_dataset(8),
                                      unlabeled_features(9, 9), c);
  const auto b = train_semisupervised(ToyModel({3, 6, 2}, 10), small_dataset(8),
                                      unlabeled_features(9, 9), c);
  EXPECT_EQ(a.teacher.params(), b.teacher.params());
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].consistency, b.steps[i].consistency);
  }
}

TEST(SemisupervisedTest, RejectsCtcKind) {
  MeanTeacherConfig c = small_config();
  c.train.seq_kind = SeqLossKind::kCtc;
  EXPECT_THROW(validate_config(c), ValidationError);
}

}  // namespace
}  // namespace seqaed
