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

#include "seqaed/labels.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include "seqaed/errors.h"
#include "seqaed/file_util.h"

namespace seqaed {
namespace {

constexpr double kTimeEps = 1e-9;

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_time(const std::string& field, const std::string& path,
                  int line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(path + ":" + std::to_string(line_no) +
                         ": cannot parse time '" + field + "'",
                     line_no);
  }
  return value;
}

}  // namespace

ClassVocabulary::ClassVocabulary(std::vector<std::string> names)
    : names_(std::move(names)) {
  for (int i = 0; i < size(); ++i) {
    const auto& n = names_[i];
    if (n.empty()) throw ValidationError("empty class name");
    if (n.find_first_of("\t\n") != std::string::npos) {
      throw ValidationError("class name contains tab or newline: " + n);
    }
    if (!index_.emplace(n, i).second) {
      throw ValidationError("duplicate class name: " + n);
    }
  }
}

const std::string& ClassVocabulary::name(int id) const {
  if (id < 0 || id >= size()) {
    throw ValidationError("class id out of range: " + std::to_string(id));
  }
  return names_[id];
}

std::optional<int> ClassVocabulary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ClassVocabulary::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw ValidationError("unknown class name: " + std::string(name));
}

void validate_annotation(const StrongAnnotation& ann, int num_classes) {
  for (std::size_t i = 0; i < ann.events.size(); ++i) {
    const Event& e = ann.events[i];
    const std::string where = "event " + std::to_string(i) + ": ";
    if (e.class_id < 0 || e.class_id >= num_classes) {
      throw ValidationError(where + "class id " + std::to_string(e.class_id) +
                            " outside [0, " + std::to_string(num_classes) +
                            ")");
    }
    if (!std::isfinite(e.onset_s) || !std::isfinite(e.offset_s)) {
      throw ValidationError(where + "non-finite time");
    }
    if (e.onset_s < 0.0) throw ValidationError(where + "negative onset");
    if (!(e.offset_s > e.onset_s)) {
      throw ValidationError(where + "offset does not exceed onset");
    }
  }
  std::vector<const Event*> sorted;
  sorted.reserve(ann.events.size());
  for (const auto& e : ann.events) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const Event* a, const Event* b) {
    return std::tie(a->class_id, a->onset_s) <
           std::tie(b->class_id, b->onset_s);
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const Event& prev = *sorted[i - 1];
    const Event& cur = *sorted[i];
    if (prev.class_id == cur.class_id && cur.onset_s < prev.offset_s) {
      throw ValidationError("overlapping events of class " +
                            std::to_string(cur.class_id) + " at " +
                            std::to_string(cur.onset_s) + "s");
    }
  }
}

bool is_balanced(const SequentialLabel& label) {
  std::map<int, bool> open;
  for (const auto& s : label) {
    bool& is_open = open[s.class_id];
    if (s.kind == BoundaryKind::kOnset) {
      if (is_open) return false;
      is_open = true;
    } else {
      if (!is_open) return false;
      is_open = false;
    }
  }
  return std::none_of(open.begin(), open.end(),
                      [](const auto& kv) { return kv.second; });
}

std::string symbol_to_string(const BoundarySymbol& symbol,
                             const ClassVocabulary& vocab) {
  return (symbol.kind == BoundaryKind::kOnset ? "onset:" : "offset:") +
         vocab.name(symbol.class_id);
}

BoundarySymbol parse_symbol(std::string_view text,
                            const ClassVocabulary& vocab) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("boundary symbol without ':' : " +
                          std::string(text));
  }
  const auto kind = text.substr(0, colon);
  BoundarySymbol symbol;
  symbol.class_id = vocab.id(text.substr(colon + 1));
  if (kind == "onset") {
    symbol.kind = BoundaryKind::kOnset;
  } else if (kind == "offset") {
    symbol.kind = BoundaryKind::kOffset;
  } else {
    throw ValidationError("unknown boundary kind: " + std::string(kind));
  }
  return symbol;
}

SequentialLabel strong_to_sequential(const StrongAnnotation& ann,
                                     int num_classes) {
  validate_annotation(ann, num_classes);
  struct Boundary {
    double time;
    BoundarySymbol symbol;
  };
  std::vector<Boundary> boundaries;
  boundaries.reserve(2 * ann.events.size());
  for (const auto& e : ann.events) {
    boundaries.push_back({e.onset_s, {e.class_id, BoundaryKind::kOnset}});
    boundaries.push_back({e.offset_s, {e.class_id, BoundaryKind::kOffset}});
  }
  // Offsets sort before onsets at equal times so that an event ending exactly
  // where the next one of the same class begins stays balanced.
  auto key = [](const Boundary& b) {
    const int kind_rank = b.symbol.kind == BoundaryKind::kOffset ? 0 : 1;
    return std::make_tuple(b.time, kind_rank, b.symbol.class_id);
  };
  std::sort(boundaries.begin(), boundaries.end(),
            [&](const Boundary& a, const Boundary& b) {
              return key(a) < key(b);
            });
  SequentialLabel label;
  label.reserve(boundaries.size());
  for (const auto& b : boundaries) label.push_back(b.symbol);
  return label;
}

WeakLabel strong_to_weak(const StrongAnnotation& ann, int num_classes) {
  validate_annotation(ann, num_classes);
  WeakLabel weak;
  for (const auto& e : ann.events) weak.insert(e.class_id);
  return weak;
}

WeakLabel sequential_to_weak(const SequentialLabel& label) {
  WeakLabel weak;
  for (const auto& s : label) weak.insert(s.class_id);
  return weak;
}

RasterizeResult rasterize(const StrongAnnotation& ann, int num_classes,
                          int frames, double hop_s) {
  if (frames < 1) throw ValidationError("rasterize: frames must be >= 1");
  if (!(hop_s > 0.0)) throw ValidationError("rasterize: hop_s must be > 0");
  validate_annotation(ann, num_classes);
  RasterizeResult result;
  result.activity.hop_s = hop_s;
  result.activity.grid = Matrix::Zero(frames, num_classes);
  const double clip_end = frames * hop_s;
  for (const auto& e : ann.events) {
    if (e.onset_s >= clip_end - kTimeEps) {
      ++result.dropped;
      continue;
    }
    // Half-open frames [t*hop, (t+1)*hop) overlapping the open interval
    // (onset, offset).
    const int first = std::max(
        0, static_cast<int>(std::floor(e.onset_s / hop_s + kTimeEps)));
    const int last = std::min(
        frames - 1,
        static_cast<int>(std::ceil(e.offset_s / hop_s - kTimeEps)) - 1);
    for (int t = first; t <= last; ++t) result.activity.grid(t, e.class_id) = 1.0;
  }
  return result;
}

StrongAnnotation derasterize(const FrameActivity& activity) {
  StrongAnnotation ann;
  const int frames = activity.frames();
  for (int c = 0; c < activity.classes(); ++c) {
    int start = -1;
    for (int t = 0; t <= frames; ++t) {
      const bool on = t < frames && activity.grid(t, c) > 0.5;
      if (on && start < 0) start = t;
      if (!on && start >= 0) {
        ann.events.push_back({c, frame_seconds(start, activity.hop_s),
                              frame_seconds(t, activity.hop_s)});
        start = -1;
      }
    }
  }
  std::sort(ann.events.begin(), ann.events.end(),
            [](const Event& a, const Event& b) {
              return std::tie(a.onset_s, a.class_id) <
                     std::tie(b.onset_s, b.class_id);
            });
  return ann;
}

AnnotationMap read_annotations(const std::string& path,
                               const ClassVocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  AnnotationMap anns;
  std::map<std::string, int> first_row;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (line_no == 1 && fields[0] == "filename") continue;
    const std::string& clip = fields[0];
    if (clip.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty clip id",
                       line_no);
    }
    auto& ann = anns[clip];
    const bool empty_row =
        fields.size() == 1 ||
        std::all_of(fields.begin() + 1, fields.end(),
                    [](const std::string& f) { return f.empty(); });
    if (empty_row) continue;
    if (fields.size() != 4) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                           ": expected 4 tab-separated fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Event e;
    e.onset_s = parse_time(fields[1], path, line_no);
    e.offset_s = parse_time(fields[2], path, line_no);
    const std::string row = path + ":" + std::to_string(line_no) + ": ";
    if (e.onset_s < 0.0 || e.offset_s < 0.0) {
      throw ValidationError(row + "negative time", line_no);
    }
    if (!(e.offset_s > e.onset_s)) {
      throw ValidationError(row + "offset does not exceed onset", line_no);
    }
    auto class_id = vocab.find(fields[3]);
    if (!class_id) {
      throw ValidationError(row + "unknown class '" + fields[3] + "'",
                            line_no);
    }
    e.class_id = *class_id;
    ann.events.push_back(e);
    try {
      validate_annotation(ann, vocab.size());
    } catch (const ValidationError& err) {
      throw ValidationError(row + "clip " + clip + ": " + err.what(), line_no);
    }
  }
  return anns;
}

void write_annotations(const std::string& path, const AnnotationMap& anns,
                       const ClassVocabulary& vocab) {
  std::ostringstream out;
  for (const auto& [clip, ann] : anns) {
    validate_annotation(ann, vocab.size());
    if (ann.events.empty()) {
      out << clip << '\n';
      continue;
    }
    for (const auto& e : ann.events) {
      out << clip << '\t' << format_seconds(e.onset_s) << '\t'
          << format_seconds(e.offset_s) << '\t' << vocab.name(e.class_id)
          << '\n';
    }
  }
  atomic_write(path, out.str());
}

std::vector<std::string> scan_class_names(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::set<std::string> names;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    auto fields = split(line, '\t');
    if (line_no == 1 && fields[0] == "filename") continue;
    if (fields.size() == 4 && !fields[3].empty()) names.insert(fields[3]);
  }
  return {names.begin(), names.end()};
}

}  // namespace seqaed
