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

#include "seqaed/metrics.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace seqaed {
namespace {

ClipResult clip(std::vector<Event> ref, std::vector<Event> pred,
                double duration = 2.0) {
  return {"c", duration, {std::move(ref)}, {std::move(pred)}};
}

StrongAnnotation random_annotation(int classes, double duration,
                                   std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 3);
  std::uniform_real_distribution<double> gap(0.0, 2.0);
  std::uniform_real_distribution<double> len(0.3, 3.0);
  StrongAnnotation ann;
  for (int c = 0; c < classes; ++c) {
    double t = gap(rng);
    for (int i = count(rng); i > 0; --i) {
      const double d = len(rng);
      if (t + d > duration) break;
      ann.events.push_back({c, t, t + d});
      t += d + gap(rng) + 0.01;
    }
  }
  return ann;
}

std::vector<ClipResult> random_results(int clips, int classes,
                                       std::mt19937_64& rng) {
  std::vector<ClipResult> out;
  for (int i = 0; i < clips; ++i) {
    out.push_back({"clip" + std::to_string(i), 10.0,
                   random_annotation(classes, 10.0, rng),
                   random_annotation(classes, 10.0, rng)});
  }
  return out;
}

TEST(SegmentFscoreTest, ExactMatch) {
  const std::vector<ClipResult> r = {clip({{0, 0, 2}}, {{0, 0, 2}})};
  const FScoreReport rep = segment_fscore(r, 1);
  EXPECT_EQ(rep.per_class[0].tp, 2);
  EXPECT_EQ(rep.macro_f1, 1.0);
}

TEST(SegmentFscoreTest, DisjointSegments) {
  const std::vector<ClipResult> r = {clip({{0, 0, 1}}, {{0, 1, 2}})};
  const FScoreReport rep = segment_fscore(r, 1);
  EXPECT_EQ(rep.per_class[0].tp, 0);
  EXPECT_EQ(rep.per_class[0].fp, 1);
  EXPECT_EQ(rep.per_class[0].fn, 1);
  EXPECT_EQ(rep.macro_f1, 0.0);
}

TEST(SegmentFscoreTest, AnyOverlapActivatesSegment) {
  const std::vector<ClipResult> r = {clip({{0, 0.5, 1.5}}, {{0, 0.9, 1.1}})};
  const FScoreReport rep = segment_fscore(r, 1);
  EXPECT_EQ(rep.per_class[0].tp, 2);
  EXPECT_EQ(rep.macro_f1, 1.0);
}

TEST(SegmentFscoreTest, UndefinedClassesExcludedFromMacro) {
  const std::vector<ClipResult> r = {clip({{0, 0, 1}}, {{0, 0, 1}})};
  const FScoreReport rep = segment_fscore(r, 3);
  EXPECT_FALSE(rep.per_class[1].defined);
  EXPECT_EQ(rep.macro_f1, 1.0);
}

TEST(SegmentFscoreTest, ShiftWithinOccupiedSegmentsIsInvariant) {
  const std::vector<ClipResult> a = {clip({{0, 0.2, 1.7}}, {{0, 0.1, 1.2}})};
  const std::vector<ClipResult> b = {clip({{0, 0.2, 1.7}}, {{0, 0.6, 1.7}})};
  EXPECT_EQ(segment_fscore(a, 1).macro_f1, segment_fscore(b, 1).macro_f1);
}

TEST(EventFscoreTest, ExactMatch) {
  const std::vector<ClipResult> r = {clip({{0, 0.3, 1.4}}, {{0, 0.3, 1.4}})};
  EXPECT_EQ(event_fscore(r, 1).macro_f1, 1.0);
}

TEST(EventFscoreTest, OnsetJustInsideCollar) {
  const std::vector<ClipResult> r = {clip({{0, 1.0, 3.0}}, {{0, 1.19, 3.0}}, 4)};
  const FScoreReport rep = event_fscore(r, 1, 0.2);
  EXPECT_EQ(rep.per_class[0].tp, 1);
}

TEST(EventFscoreTest, OnsetJustOutsideCollar) {
  const std::vector<ClipResult> r = {clip({{0, 1.0, 3.0}}, {{0, 1.21, 3.0}}, 4)};
  const FScoreReport rep = event_fscore(r, 1, 0.2);
  EXPECT_EQ(rep.per_class[0].tp, 0);
  EXPECT_EQ(rep.per_class[0].fp, 1);
  EXPECT_EQ(rep.per_class[0].fn, 1);
}

TEST(EventFscoreTest, OffsetToleranceScalesWithDuration) {
  // Reference lasts 4 s, so the offset may move by up to 2 s.
  const std::vector<ClipResult> ok = {clip({{0, 0, 4}}, {{0, 0, 5.9}}, 6)};
  const std::vector<ClipResult> bad = {clip({{0, 0, 4}}, {{0, 0, 2.0 - 0.1}}, 6)};
  EXPECT_EQ(event_fscore(ok, 1).per_class[0].tp, 1);
  EXPECT_EQ(event_fscore(bad, 1).per_class[0].tp, 0);
}

TEST(EventFscoreTest, OneToOneMatching) {
  const std::vector<ClipResult> r = {
      clip({{0, 1.0, 2.0}}, {{0, 1.0, 2.0}, {0, 1.05, 2.0}}, 3)};
  const FScoreReport rep = event_fscore(r, 1);
  EXPECT_EQ(rep.per_class[0].tp, 1);
  EXPECT_EQ(rep.per_class[0].fp, 1);
  EXPECT_NEAR(rep.per_class[0].f1, 2.0 / 3.0, 1e-15);
}

TEST(EventFscoreTest, ClassMustAgree) {
  const std::vector<ClipResult> r = {clip({{0, 0, 1}}, {{1, 0, 1}})};
  const FScoreReport rep = event_fscore(r, 2);
  EXPECT_EQ(rep.per_class[0].fn, 1);
  EXPECT_EQ(rep.per_class[1].fp, 1);
  EXPECT_EQ(rep.macro_f1, 0.0);
}

TEST(FscoreProperties, PerfectPredictionsScoreOne) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto results = random_results(10, 4, rng);
    for (auto& r : results) r.prediction = r.reference;
    EXPECT_EQ(segment_fscore(results, 4).macro_f1, 1.0);
    EXPECT_EQ(event_fscore(results, 4).macro_f1, 1.0);
  }
}

TEST(FscoreProperties, F1IsHarmonicMean) {
  std::mt19937_64 rng(12);
  const auto results = random_results(20, 4, rng);
  for (const FScoreReport& rep :
       {segment_fscore(results, 4), event_fscore(results, 4)}) {
    for (const ClassScore& s : rep.per_class) {
      const double pr = s.precision + s.recall;
      EXPECT_NEAR(s.f1, pr > 0 ? 2 * s.precision * s.recall / pr : 0.0, 1e-15);
    }
  }
}

TEST(FscoreProperties, SymmetricUnderClipAndClassPermutation) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto results = random_results(8, 4, rng);
    const FScoreReport seg = segment_fscore(results, 4);
    const FScoreReport ev = event_fscore(results, 4);

    std::vector<int> perm = {0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::shuffle(results.begin(), results.end(), rng);
    for (auto& r : results) {
      for (Event& e : r.reference.events) e.class_id = perm[e.class_id];
      for (Event& e : r.prediction.events) e.class_id = perm[e.class_id];
    }
    const FScoreReport seg2 = segment_fscore(results, 4);
    const FScoreReport ev2 = event_fscore(results, 4);
    EXPECT_NEAR(seg2.macro_f1, seg.macro_f1, 1e-12);
    EXPECT_NEAR(ev2.macro_f1, ev.macro_f1, 1e-12);
    for (int c = 0; c < 4; ++c) {
      EXPECT_EQ(seg2.per_class[perm[c]].tp, seg.per_class[c].tp);
      EXPECT_EQ(ev2.per_class[perm[c]].tp, ev.per_class[c].tp);
      EXPECT_EQ(ev2.per_class[perm[c]].fp, ev.per_class[c].fp);
    }
  }
}

TEST(PeakClusterTest, Examples) {
  const std::vector<ClipResult> one = {clip({{0, 0, 1}}, {{0, 0.2, 0.8}})};
  EXPECT_EQ(peak_cluster_score(one), 1.0);
  const std::vector<ClipResult> three = {
      clip({{0, 0, 1}}, {{0, 0.1, 0.2}, {0, 0.4, 0.5}, {0, 0.7, 0.8}})};
  EXPECT_EQ(peak_cluster_score(three), 3.0);
  const std::vector<ClipResult> none = {clip({{0, 0, 1}}, {})};
  EXPECT_EQ(peak_cluster_score(none), 0.0);
}

TEST(PeakClusterTest, IgnoresOtherClassesAndEmptyClips) {
  const std::vector<ClipResult> r = {
      clip({{0, 0, 1}}, {{0, 0.2, 0.8}, {1, 0.2, 0.8}}),
      clip({}, {{0, 0, 1}, {0, 1, 2}}),
  };
  EXPECT_EQ(peak_cluster_score(r), 1.0);
  EXPECT_FALSE(peak_cluster_score(std::vector<ClipResult>{}).has_value());
  EXPECT_FALSE(
      peak_cluster_score(std::vector<ClipResult>{clip({}, {{0, 0, 1}})})
          .has_value());
}

TEST(PosteriorsToEventsTest, SingleRun) {
  Posteriorgram post{Matrix(4, 1), 0.1};
  post.y << 0, 1, 1, 0;
  const StrongAnnotation ann = posteriors_to_events(post, 0.5, 1);
  ASSERT_EQ(ann.events.size(), 1u);
  EXPECT_NEAR(ann.events[0].onset_s, 0.1, 1e-12);
  EXPECT_NEAR(ann.events[0].offset_s, 0.3, 1e-12);
}

TEST(PosteriorsToEventsTest, AllBelowThreshold) {
  Posteriorgram post{Matrix::Constant(6, 2, 0.4), 0.1};
  EXPECT_TRUE(posteriors_to_events(post, 0.5, 3).events.empty());
}

// Independent zero-padded median over a binary sequence.
std::vector<int> median_oracle(const std::vector<int>& x, int window) {
  const int half = window / 2;
  const int n = static_cast<int>(x.size());
  std::vector<int> out(n);
  for (int t = 0; t < n; ++t) {
    int ones = 0;
    for (int k = t - half; k <= t + half; ++k) {
      if (k >= 0 && k < n) ones += x[k];
    }
    out[t] = 2 * ones > window ? 1 : 0;
  }
  return out;
}

TEST(PosteriorsToEventsTest, MedianFilterWithZeroPadding) {
  // Windows {0,1,0}, {1,0,1}, {0,1,0}: only the middle frame survives.
  Posteriorgram post{Matrix(3, 1), 0.1};
  post.y << 1, 0, 1;
  EXPECT_EQ(median_oracle({1, 0, 1}, 3), (std::vector<int>{0, 1, 0}));
  const StrongAnnotation ann = posteriors_to_events(post, 0.5, 3);
  ASSERT_EQ(ann.events.size(), 1u);
  EXPECT_NEAR(ann.events[0].onset_s, 0.1, 1e-12);
  EXPECT_NEAR(ann.events[0].offset_s, 0.2, 1e-12);
}

TEST(PosteriorsToEventsTest, MatchesMedianOracle) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int window : {1, 3, 5, 7}) {
    for (int trial = 0; trial < 50; ++trial) {
      Posteriorgram post{Matrix(25, 1), 0.1};
      std::vector<int> bin(25);
      for (int t = 0; t < 25; ++t) {
        post.y(t, 0) = u(rng);
        bin[t] = post.y(t, 0) >= 0.5;
      }
      const std::vector<int> filtered = median_oracle(bin, window);
      std::vector<int> got(25, 0);
      for (const Event& e : posteriors_to_events(post, 0.5, window).events) {
        for (int t = static_cast<int>(std::lround(e.onset_s / 0.1));
             t < std::lround(e.offset_s / 0.1); ++t) {
          got[t] = 1;
        }
      }
      EXPECT_EQ(got, filtered);
    }
  }
}

TEST(PosteriorsToEventsTest, MedianFilterFillsShortGap) {
  Posteriorgram post{Matrix(7, 1), 0.1};
  post.y << 0, 1, 1, 0, 1, 1, 0;
  const StrongAnnotation ann = posteriors_to_events(post, 0.5, 3);
  ASSERT_EQ(ann.events.size(), 1u);
  EXPECT_NEAR(ann.events[0].onset_s, 0.1, 1e-12);
  EXPECT_NEAR(ann.events[0].offset_s, 0.6, 1e-12);
}

TEST(BoundariesToEventsTest, PairsOnsetsWithOffsets) {
  const std::vector<AlignedSymbol> s = {
      {{0, BoundaryKind::kOnset}, 2},
      {{1, BoundaryKind::kOffset}, 3},  // stray offset
      {{0, BoundaryKind::kOffset}, 5},
      {{1, BoundaryKind::kOnset}, 7},  // still open at the end
  };
  const StrongAnnotation ann = boundaries_to_events(s, 2, 10, 0.1);
  ASSERT_EQ(ann.events.size(), 2u);
  EXPECT_EQ(ann.events[0].class_id, 0);
  EXPECT_NEAR(ann.events[0].onset_s, 0.2, 1e-12);
  EXPECT_NEAR(ann.events[0].offset_s, 0.5, 1e-12);
  EXPECT_EQ(ann.events[1].class_id, 1);
  EXPECT_NEAR(ann.events[1].onset_s, 0.7, 1e-12);
  EXPECT_NEAR(ann.events[1].offset_s, 1.0, 1e-12);
}

TEST(BoundariesToEventsTest, RepeatedOnsetsSplitEvents) {
  const std::vector<AlignedSymbol> s = {
      {{0, BoundaryKind::kOnset}, 1},
      {{0, BoundaryKind::kOnset}, 3},
      {{0, BoundaryKind::kOnset}, 4},
  };
  EXPECT_EQ(boundaries_to_events(s, 1, 6, 0.5).events.size(), 3u);
}

}  // namespace
}  // namespace seqaed
