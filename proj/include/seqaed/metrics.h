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

// Detection metrics: segment-based and event-based F-scores with macro
// averaging, a peak-clustering diagnostic, and posterior post-processing.

#ifndef SEQAED_METRICS_H_
#define SEQAED_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqaed/ctc.h"
#include "seqaed/labels.h"
#include "seqaed/matrix.h"

namespace seqaed {

inline constexpr double kDefaultSegmentSeconds = 1.0;
inline constexpr double kDefaultOnsetCollarSeconds = 0.2;
inline constexpr double kDefaultOffsetRatio = 0.5;

// Frame-level event activity probabilities, T x C.
struct Posteriorgram {
  Matrix y;
  double hop_s = 0.0;
};

struct ClipResult {
  std::string clip_id;
  double duration_s = 0.0;
  StrongAnnotation reference;
  StrongAnnotation prediction;
};

struct ClassScore {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // False for classes absent from both reference and prediction.
  bool defined = false;
};

struct FScoreReport {
  std::vector<ClassScore> per_class;
  // Unweighted mean of per-class F1 over defined classes (0 if none).
  double macro_f1 = 0.0;
};

// Each clip's timeline [0, duration) is cut into segments of `segment_s`; a
// class is active in a segment if any of its events overlaps it. The timeline
// is extended when an event ends past `duration_s`.
FScoreReport segment_fscore(std::span<const ClipResult> results,
                            int num_classes,
                            double segment_s = kDefaultSegmentSeconds);

// A prediction matches an unmatched reference of the same class when
// |onset diff| <= collar and |offset diff| <= max(collar, ratio * ref
// duration). References are visited in onset order and take the earliest
// matching prediction.
FScoreReport event_fscore(std::span<const ClipResult> results, int num_classes,
                          double onset_collar_s = kDefaultOnsetCollarSeconds,
                          double offset_ratio = kDefaultOffsetRatio);

// Mean number of same-class predictions overlapping each reference event.
// nullopt when there are no reference events.
std::optional<double> peak_cluster_score(std::span<const ClipResult> results);

// Binarize at `threshold`, median-filter each class over `median_window`
// frames (zero padded), and turn active runs into events.
StrongAnnotation posteriors_to_events(const Posteriorgram& post,
                                      double threshold, int median_window);

// Turns frame-aligned boundary symbols into events. An onset opens an event
// (closing any open event of its class), an offset closes it, and events still
// open at the end close at frames * hop_s. Offsets without an open event are
// ignored.
StrongAnnotation boundaries_to_events(std::span<const AlignedSymbol> symbols,
                                      int num_classes, int frames,
                                      double hop_s);

}  // namespace seqaed

#endif  // SEQAED_METRICS_H_
