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

#include "gtest/gtest.h"
#include "seqaed/errors.h"
#include "test_util.h"

namespace seqaed {
namespace {

TEST(SerializationTest, VocabularyRoundTrip) {
  const ClassVocabulary v({"Speech", "Dog", "Frying"});
  EXPECT_EQ(vocabulary_from_json(vocabulary_to_json(v)), v);
}

TEST(SerializationTest, SequentialLabelAsStrings) {
  const ClassVocabulary v({"Speech", "Dog"});
  const SequentialLabel label = {{1, BoundaryKind::kOnset},
                                 {0, BoundaryKind::kOnset},
                                 {1, BoundaryKind::kOffset},
                                 {0, BoundaryKind::kOffset}};
  const Json j = sequential_to_json(label, v);
  EXPECT_EQ(j[0], "onset:Dog");
  EXPECT_EQ(j[2], "offset:Dog");
  EXPECT_EQ(sequential_from_json(j, v), label);
}

TEST(SerializationTest, GenSpecRoundTripAndPartialOverride) {
  GenSpec s;
  s.classes = 6;
  s.jitter_frac = 0.3;
  s.seed = 99;
  EXPECT_EQ(gen_spec_from_json(to_json(s)), s);
  const GenSpec partial = gen_spec_from_json(Json{{"snr_db", -3.0}});
  EXPECT_EQ(partial.snr_db, -3.0);
  EXPECT_EQ(partial.classes, GenSpec{}.classes);
}

TEST(SerializationTest, TrainConfigRoundTrip) {
  TrainConfig c;
  c.epochs = 7;
  c.seq_kind = SeqLossKind::kCtc;
  c.weights = {1.5, 0.0, 2.0};
  c.readout = Readout::kCtcBoundaries;
  c.max_grad_norm = 5.0;
  const TrainConfig back = train_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.weights, c.weights);
  EXPECT_EQ(back.seq_kind, SeqLossKind::kCtc);
}

TEST(SerializationTest, MeanTeacherConfigRoundTrip) {
  MeanTeacherConfig c;
  c.ema_decay = 0.99;
  c.consistency.schedule_half = 40;
  c.supervised_seq_in_strong_phase = false;
  c.train.epochs = 3;
  const MeanTeacherConfig back = mean_teacher_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(SerializationTest, UnknownKeysRejected) {
  EXPECT_THROW(train_config_from_json(Json{{"epoch", 3}}), ValidationError);
  EXPECT_THROW(gen_spec_from_json(Json{{"clases", 3}}), ValidationError);
  EXPECT_THROW(mean_teacher_config_from_json(Json{{"ema", 0.9}}),
               ValidationError);
}

TEST(SerializationTest, BadSeqKindRejected) {
  EXPECT_EQ(parse_seq_kind("ctl"), SeqLossKind::kCtl);
  EXPECT_EQ(std::string(seq_kind_name(SeqLossKind::kCtc)), "ctc");
  EXPECT_THROW(parse_seq_kind("rnnt"), ValidationError);
}

TEST(SerializationTest, CheckpointRoundTrip) {
  testing::TempDir dir;
  const ToyModel model({5, 7, 3}, 42);
  save_checkpoint(dir.file("ckpt"), model);
  const ToyModel back = load_checkpoint(dir.file("ckpt"));
  EXPECT_EQ(back.shape(), model.shape());
  EXPECT_EQ(back.params(), model.params());
}

TEST(SerializationTest, TruncatedCheckpointRejected) {
  testing::TempDir dir;
  save_checkpoint(dir.file("ckpt"), ToyModel({2, 3, 1}, 1));
  const std::string bin = testing::read_text(dir.file("ckpt.bin"));
  testing::write_text(dir.file("ckpt.bin"), bin.substr(0, bin.size() - 8));
  EXPECT_ANY_THROW(load_checkpoint(dir.file("ckpt")));
}

}  // namespace
}  // namespace seqaed
