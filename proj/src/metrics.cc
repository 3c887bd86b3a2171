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
#include <tuple>

#include "seqaed/errors.h"

namespace seqaed {
namespace {

// Absorbs decimal round-off such as 1.19 - 1.0 = 0.19000000000000006.
constexpr double kTolerance = 1e-9;

void finalize(ClassScore& s) {
  s.defined = s.tp + s.fp + s.fn > 0;
  s.precision = s.tp + s.fp > 0 ? static_cast<double>(s.tp) / (s.tp + s.fp)
                                : 0.0;
  s.recall = s.tp + s.fn > 0 ? static_cast<double>(s.tp) / (s.tp + s.fn) : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
}

FScoreReport summarize(std::vector<ClassScore> per_class) {
  FScoreReport report;
  double sum = 0.0;
  int defined = 0;
  for (auto& s : per_class) {
    finalize(s);
    if (s.defined) {
      sum += s.f1;
      ++defined;
    }
  }
  report.per_class = std::move(per_class);
  report.macro_f1 = defined > 0 ? sum / defined : 0.0;
  return report;
}

std::vector<bool> segment_activity(const StrongAnnotation& ann, int cls,
                                   int segments, double segment_s) {
  std::vector<bool> active(segments, false);
  for (const auto& e : ann.events) {
    if (e.class_id != cls) continue;
    for (int k = 0; k < segments; ++k) {
      const double lo = k * segment_s;
      const double hi = (k + 1) * segment_s;
      if (e.onset_s < hi - kTolerance && e.offset_s > lo + kTolerance) {
        active[k] = true;
      }
    }
  }
  return active;
}

bool overlaps(const Event& a, const Event& b) {
  return a.onset_s < b.offset_s && b.onset_s < a.offset_s;
}

}  // namespace

FScoreReport segment_fscore(std::span<const ClipResult> results,
                            int num_classes, double segment_s) {
  if (!(segment_s > 0.0)) {
    throw ValidationError("segment_fscore: segment length must be > 0");
  }
  std::vector<ClassScore> scores(num_classes);
  for (const auto& clip : results) {
    double end = clip.duration_s;
    for (const auto* ann : {&clip.reference, &clip.prediction}) {
      for (const auto& e : ann->events) end = std::max(end, e.offset_s);
    }
    const int segments =
        std::max(1, static_cast<int>(std::ceil(end / segment_s - kTolerance)));
    for (int c = 0; c < num_classes; ++c) {
      const auto ref = segment_activity(clip.reference, c, segments, segment_s);
      const auto pred =
          segment_activity(clip.prediction, c, segments, segment_s);
      for (int k = 0; k < segments; ++k) {
        if (ref[k] && pred[k]) ++scores[c].tp;
        if (!ref[k] && pred[k]) ++scores[c].fp;
        if (ref[k] && !pred[k]) ++scores[c].fn;
      }
    }
  }
  return summarize(std::move(scores));
}

FScoreReport event_fscore(std::span<const ClipResult> results, int num_classes,
                          double onset_collar_s, double offset_ratio) {
  if (!(onset_collar_s > 0.0)) {
    throw ValidationError("event_fscore: onset collar must be > 0");
  }
  if (!(offset_ratio > 0.0 && offset_ratio <= 1.0)) {
    throw ValidationError("event_fscore: offset ratio must lie in (0, 1]");
  }
  std::vector<ClassScore> scores(num_classes);
  for (const auto& clip : results) {
    for (int c = 0; c < num_classes; ++c) {
      std::vector<Event> refs, preds;
      for (const auto& e : clip.reference.events) {
        if (e.class_id == c) refs.push_back(e);
      }
      for (const auto& e : clip.prediction.events) {
        if (e.class_id == c) preds.push_back(e);
      }
      auto by_onset = [](const Event& a, const Event& b) {
        return std::tie(a.onset_s, a.offset_s) <
               std::tie(b.onset_s, b.offset_s);
      };
      std::sort(refs.begin(), refs.end(), by_onset);
      std::sort(preds.begin(), preds.end(), by_onset);
      std::vector<bool> used(preds.size(), false);
      int tp = 0;
      for (const auto& r : refs) {
        const double offset_collar =
            std::max(onset_collar_s, offset_ratio * r.duration());
        for (std::size_t j = 0; j < preds.size(); ++j) {
          if (used[j]) continue;
          const auto& p = preds[j];
          if (std::abs(p.onset_s - r.onset_s) <= onset_collar_s + kTolerance &&
              std::abs(p.offset_s - r.offset_s) <= offset_collar + kTolerance) {
            used[j] = true;
            ++tp;
            break;
          }
        }
      }
      scores[c].tp += tp;
      scores[c].fp += static_cast<int>(preds.size()) - tp;
      scores[c].fn += static_cast<int>(refs.size()) - tp;
    }
  }
  return summarize(std::move(scores));
}

std::optional<double> peak_cluster_score(std::span<const ClipResult> results) {
  long total = 0;
  long references = 0;
  for (const auto& clip : results) {
    for (const auto& r : clip.reference.events) {
      ++references;
      for (const auto& p : clip.prediction.events) {
        if (p.class_id == r.class_id && overlaps(p, r)) ++total;
      }
    }
  }
  if (references == 0) return std::nullopt;
  return static_cast<double>(total) / static_cast<double>(references);
}

StrongAnnotation posteriors_to_events(const Posteriorgram& post,
                                      double threshold, int median_window) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("posteriors_to_events: threshold must be in (0, 1)");
  }
  if (median_window < 1 || median_window % 2 == 0) {
    throw ValidationError("posteriors_to_events: median window must be odd");
  }
  const int frames = static_cast<int>(post.y.rows());
  const int classes = static_cast<int>(post.y.cols());
  const int half = median_window / 2;
  FrameActivity activity;
  activity.hop_s = post.hop_s;
  activity.grid = Matrix::Zero(frames, classes);
  for (int c = 0; c < classes; ++c) {
    std::vector<int> binary(frames);
    for (int t = 0; t < frames; ++t) binary[t] = post.y(t, c) >= threshold;
    for (int t = 0; t < frames; ++t) {
      // Median of a 0/1 window is 1 iff more than half of it is 1.
      int ones = 0;
      for (int k = t - half; k <= t + half; ++k) {
        if (k >= 0 && k < frames) ones += binary[k];
      }
      activity.grid(t, c) = 2 * ones > median_window ? 1.0 : 0.0;
    }
  }
  return derasterize(activity);
}

StrongAnnotation boundaries_to_events(std::span<const AlignedSymbol> symbols,
                                      int num_classes, int frames,
                                      double hop_s) {
  StrongAnnotation ann;
  std::vector<int> open(num_classes, -1);
  auto close = [&](int c, int frame) {
    // Keep at least one frame so the event is non-empty.
    const int end = std::max(frame, open[c] + 1);
    ann.events.push_back(
        {c, frame_seconds(open[c], hop_s), frame_seconds(end, hop_s)});
    open[c] = -1;
  };
  for (const auto& a : symbols) {
    const int c = a.symbol.class_id;
    if (c < 0 || c >= num_classes) continue;
    if (a.symbol.kind == BoundaryKind::kOnset) {
      if (open[c] >= 0) close(c, a.frame);
      open[c] = a.frame;
    } else if (open[c] >= 0) {
      close(c, a.frame);
    }
  }
  for (int c = 0; c < num_classes; ++c) {
    if (open[c] >= 0) close(c, frames);
  }
  std::sort(ann.events.begin(), ann.events.end(),
            [](const Event& a, const Event& b) {
              return std::tie(a.onset_s, a.class_id) <
                     std::tie(b.onset_s, b.class_id);
            });
  return ann;
}

}  // namespace seqaed
