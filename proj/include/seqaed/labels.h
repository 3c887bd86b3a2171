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

// Label forms for audio event detection.
//
// A strong annotation lists events with onset/offset times. Converting it to a
// sequential label keeps only the chronological order of the event boundaries
// (one onset and one offset symbol per class, 2*C symbols in total); a weak
// label keeps only the set of classes present.

#ifndef SEQAED_LABELS_H_
#define SEQAED_LABELS_H_

#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqaed/matrix.h"

namespace seqaed {

struct EventClass {
  int id = 0;
  std::string name;
  auto operator<=>(const EventClass&) const = default;
};

// Dense class ids [0, C) with unique names.
class ClassVocabulary {
 public:
  ClassVocabulary() = default;
  explicit ClassVocabulary(std::vector<std::string> names);

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const;
  EventClass at(int id) const { return {id, name(id)}; }
  // Throws ValidationError for unknown names.
  int id(std::string_view name) const;
  std::optional<int> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const ClassVocabulary& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

struct Event {
  int class_id = 0;
  double onset_s = 0.0;
  double offset_s = 0.0;

  double duration() const { return offset_s - onset_s; }
  bool operator==(const Event&) const = default;
};

struct StrongAnnotation {
  std::vector<Event> events;
  bool operator==(const StrongAnnotation&) const = default;
};

// Throws ValidationError unless every event has 0 <= onset < offset, a class
// id in [0, num_classes), and no two events of the same class overlap.
// Touching events (offset == next onset) are allowed.
void validate_annotation(const StrongAnnotation& ann, int num_classes);

enum class BoundaryKind { kOnset = 0, kOffset = 1 };

struct BoundarySymbol {
  int class_id = 0;
  BoundaryKind kind = BoundaryKind::kOnset;

  // Position in the 2*C boundary alphabet: onset_c = 2c, offset_c = 2c + 1.
  int index() const { return 2 * class_id + static_cast<int>(kind); }
  static BoundarySymbol from_index(int index) {
    return {index / 2, index % 2 == 0 ? BoundaryKind::kOnset
                                      : BoundaryKind::kOffset};
  }
  bool operator==(const BoundarySymbol&) const = default;
};

using SequentialLabel = std::vector<BoundarySymbol>;
using WeakLabel = std::set<int>;

// True when, per class, symbols alternate onset/offset starting with onset
// and ending with offset.
bool is_balanced(const SequentialLabel& label);

// "onset:Speech" / "offset:Speech".
std::string symbol_to_string(const BoundarySymbol& symbol,
                             const ClassVocabulary& vocab);
BoundarySymbol parse_symbol(std::string_view text,
                            const ClassVocabulary& vocab);

// Boundaries sorted by (time, offset before onset, class id).
SequentialLabel strong_to_sequential(const StrongAnnotation& ann,
                                     int num_classes);

WeakLabel strong_to_weak(const StrongAnnotation& ann, int num_classes);

WeakLabel sequential_to_weak(const SequentialLabel& label);

// Start time of `frame`, snapped to 1 ns so that e.g. 34 * 0.2 reads 6.8.
inline double frame_seconds(int frame, double hop_s) {
  return std::round(frame * hop_s * 1e9) / 1e9;
}

// T x C binary grid; frame t covers [t*hop, (t+1)*hop).
struct FrameActivity {
  Matrix grid;
  double hop_s = 0.0;

  int frames() const { return static_cast<int>(grid.rows()); }
  int classes() const { return static_cast<int>(grid.cols()); }
};

struct RasterizeResult {
  FrameActivity activity;
  // Events that start at or after frames*hop_s and were therefore dropped.
  int dropped = 0;
};

// grid(t, c) = 1 iff frame t overlaps an event of class c.
RasterizeResult rasterize(const StrongAnnotation& ann, int num_classes,
                          int frames, double hop_s);

// Contiguous active runs back to events with frame-quantized times.
StrongAnnotation derasterize(const FrameActivity& activity);

using AnnotationMap = std::map<std::string, StrongAnnotation>;

// Tab-separated `clip onset offset class` rows. A row holding only a clip id
// declares a clip without events. An optional header row whose first field is
// "filename" is skipped.
AnnotationMap read_annotations(const std::string& path,
                               const ClassVocabulary& vocab);
void write_annotations(const std::string& path, const AnnotationMap& anns,
                       const ClassVocabulary& vocab);

// Sorted unique class names mentioned in an annotation file.
std::vector<std::string> scan_class_names(const std::string& path);

}  // namespace seqaed

#endif  // SEQAED_LABELS_H_
