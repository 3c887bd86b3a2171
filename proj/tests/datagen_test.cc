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

#include "seqaed/datagen.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "seqaed/errors.h"
#include "test_util.h"

namespace seqaed {
namespace {

GenSpec small_spec() {
  GenSpec s;
  s.classes = 3;
  s.features = 8;
  s.frames = 40;
  s.hop_s = 0.1;
  s.min_duration_s = 0.3;
  s.max_duration_s = 1.5;
  s.seed = 17;
  return s;
}

std::multiset<int> class_multiset(const StrongAnnotation& ann) {
  std::multiset<int> out;
  for (const Event& e : ann.events) out.insert(e.class_id);
  return out;
}

TEST(DatagenTest, ZeroJitterLeavesAnnotationUnchanged) {
  GenSpec s = small_spec();
  s.jitter_frac = 0.0;
  for (const SyntheticClip& c : generate(s, 20)) EXPECT_EQ(c.noisy, c.truth);
}

TEST(DatagenTest, SameSeedSameClips) {
  const auto a = generate(small_spec(), 10);
  const auto b = generate(small_spec(), 10);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].features, b[i].features);
    EXPECT_EQ(a[i].truth, b[i].truth);
    EXPECT_EQ(a[i].noisy, b[i].noisy);
  }
  GenSpec other = small_spec();
  other.seed = 18;
  EXPECT_NE(generate(other, 1)[0].features, a[0].features);
}

TEST(DatagenTest, DisjointRangesMatchOneShotGeneration) {
  const auto all = generate(small_spec(), 12);
  const auto tail = generate(small_spec(), 5, 7);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(tail[i].id, all[7 + i].id);
    EXPECT_EQ(tail[i].features, all[7 + i].features);
    EXPECT_EQ(tail[i].noisy, all[7 + i].noisy);
  }
}

TEST(DatagenTest, ClipInvariants) {
  const GenSpec s = small_spec();
  for (const SyntheticClip& c : generate(s, 200)) {
    EXPECT_EQ(c.features.rows(), s.frames);
    EXPECT_EQ(c.features.cols(), s.features);
    EXPECT_NO_THROW(validate_annotation(c.truth, s.classes));
    EXPECT_NO_THROW(validate_annotation(c.noisy, s.classes));
    EXPECT_EQ(c.weak, strong_to_weak(c.truth, s.classes));
    EXPECT_EQ(c.sequential, strong_to_sequential(c.noisy, s.classes));
    EXPECT_EQ(class_multiset(c.noisy), class_multiset(c.truth));
    for (const Event& e : c.truth.events) {
      EXPECT_GE(e.duration(), s.min_duration_s - 1e-9);
      EXPECT_LE(e.offset_s, s.clip_length_s() + 1e-9);
    }
  }
}

TEST(DatagenTest, MinimumDurationLongerThanClipIsRejected) {
  GenSpec s = small_spec();
  s.min_duration_s = 10.0;
  s.max_duration_s = 12.0;
  EXPECT_THROW(generate(s, 1), ValidationError);
}

TEST(DatagenTest, NoiseLevelFollowsSnr) {
  GenSpec s = small_spec();
  s.snr_db = 10.0;
  EXPECT_NEAR(noise_stddev(s), std::sqrt(0.1 / 8.0), 1e-15);
  const Matrix t = class_templates(s);
  for (int c = 0; c < s.classes; ++c) EXPECT_NEAR(t.row(c).norm(), 1.0, 1e-12);
}

TEST(DatagenTest, NearestTemplateClassifierAtHighSnr) {
  GenSpec s = small_spec();
  s.features = 16;
  s.snr_db = 10.0;
  const Matrix templates = class_templates(s);
  int correct = 0;
  int total = 0;
  for (const SyntheticClip& c : generate(s, 100)) {
    const Matrix grid =
        rasterize(c.truth, s.classes, s.frames, s.hop_s).activity.grid;
    for (int t = 0; t < s.frames; ++t) {
      if (grid.row(t).sum() > 1) continue;  // mixtures have no single label
      int truth = -1;
      for (int k = 0; k < s.classes; ++k) {
        if (grid(t, k) > 0) truth = k;
      }
      // Background is the zero template.
      int best = -1;
      double best_dist = c.features.row(t).squaredNorm();
      for (int k = 0; k < s.classes; ++k) {
        const double d = (c.features.row(t) - templates.row(k)).squaredNorm();
        if (d < best_dist) {
          best_dist = d;
          best = k;
        }
      }
      correct += best == truth;
      ++total;
    }
  }
  EXPECT_GT(static_cast<double>(correct) / total, 0.95);
}

TEST(JitterTest, ZeroSigmaIsIdentity) {
  const StrongAnnotation ann{{{0, 1.0, 3.0}, {1, 0.5, 0.9}}};
  EXPECT_EQ(jitter(ann, 0.0, 5, 10.0, 0.1), ann);
}

TEST(JitterTest, OnsetSpreadMatchesSigma) {
  const StrongAnnotation ann{{{0, 4.0, 6.0}}};
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const StrongAnnotation j = jitter(ann, 0.1, 1000 + i, 20.0, 0.1);
    const double d = j.events[0].onset_s - 4.0;
    sum += d;
    sum_sq += d * d;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum_sq / n - mean * mean);
  EXPECT_NEAR(sd, 0.2, 0.02);
}

TEST(JitterTest, InvariantsUnderLargeNoise) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> start(0, 90);
  std::uniform_int_distribution<int> len(1, 20);
  for (int draw = 0; draw < 1000; ++draw) {
    // Random valid annotation on a 0.1 s grid in a 10 s clip.
    StrongAnnotation ann;
    for (int c = 0; c < 3; ++c) {
      int t = start(rng) / 3;
      while (t < 100) {
        const int d = std::min(len(rng), 100 - t);
        ann.events.push_back({c, t * 0.1, (t + d) * 0.1});
        t += d + 1 + start(rng) / 4;
      }
    }
    const StrongAnnotation j = jitter(ann, 2.0, draw, 10.0, 0.1);
    ASSERT_NO_THROW(validate_annotation(j, 3));
    ASSERT_EQ(j.events.size(), ann.events.size());
    for (std::size_t k = 0; k < j.events.size(); ++k) {
      EXPECT_EQ(j.events[k].class_id, ann.events[k].class_id);
      EXPECT_GE(j.events[k].onset_s, 0.0);
      EXPECT_LE(j.events[k].offset_s, 10.0 + 1e-12);
      EXPECT_GE(j.events[k].duration(), 0.1 - 1e-9);
    }
    EXPECT_EQ(strong_to_weak(j, 3), strong_to_weak(ann, 3));
    EXPECT_EQ(strong_to_sequential(j, 3).size(),
              strong_to_sequential(ann, 3).size());
  }
}

TEST(JitterTest, ShortEventAtClipStartNeverInverts) {
  const StrongAnnotation ann{{{0, 0.0, 0.1}}};
  for (int seed = 0; seed < 1000; ++seed) {
    const Event e = jitter(ann, 50.0, seed, 5.0, 0.1).events[0];
    EXPECT_GE(e.onset_s, 0.0);
    EXPECT_GE(e.offset_s - e.onset_s, 0.1 - 1e-12);
  }
}

TEST(MakeDatasetTest, LabelFormsAndReferences) {
  GenSpec s = small_spec();
  const auto train = generate(s, 6);
  const auto eval = generate(s, 3, 100);
  const Dataset d = make_dataset(s, train, eval, {true, false, true});
  ASSERT_EQ(d.train.size(), 6u);
  EXPECT_TRUE(d.train[0].strong.has_value());
  EXPECT_FALSE(d.train[0].weak.has_value());
  EXPECT_EQ(*d.train[0].sequential, train[0].sequential);
  EXPECT_EQ(d.train[0].strong->grid,
            rasterize(train[0].noisy, s.classes, s.frames, s.hop_s)
                .activity.grid);
  EXPECT_EQ(d.eval[2].reference, eval[2].truth);
}

TEST(PersistenceTest, SaveLoadRoundTrip) {
  testing::TempDir dir;
  SyntheticDataset data;
  data.spec = small_spec();
  data.vocab = synthetic_vocabulary(data.spec.classes);
  data.splits["train"] = generate(data.spec, 5);
  data.splits["eval"] = generate(data.spec, 2, 50);
  save_dataset(dir.file("ds"), data);
  const SyntheticDataset back = load_dataset(dir.file("ds"));
  EXPECT_EQ(back.spec, data.spec);
  EXPECT_EQ(back.vocab, data.vocab);
  ASSERT_EQ(back.splits.size(), 2u);
  for (const auto& [name, clips] : data.splits) {
    const auto& other = back.splits.at(name);
    ASSERT_EQ(other.size(), clips.size());
    for (std::size_t i = 0; i < clips.size(); ++i) {
      EXPECT_EQ(other[i].id, clips[i].id);
      EXPECT_EQ(other[i].features, clips[i].features);
      EXPECT_EQ(other[i].truth, clips[i].truth);
      EXPECT_EQ(other[i].noisy, clips[i].noisy);
      EXPECT_EQ(other[i].sequential, clips[i].sequential);
    }
  }
}

}  // namespace
}  // namespace seqaed
