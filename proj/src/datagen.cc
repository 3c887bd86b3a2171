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
#include <filesystem>
#include <random>

#include "json.hpp"
#include "seqaed/errors.h"
#include "seqaed/file_util.h"
#include "seqaed/serialization.h"

namespace seqaed {
namespace {

constexpr std::uint64_t kTemplateStream = 0x7e3a9b15c4d2f601ULL;
constexpr std::uint64_t kJitterStream = 0x2545f4914f6cdd1dULL;

const char* const kDomesticClasses[] = {
    "Speech", "Dog",     "Cat",            "Alarm_bell_ringing",
    "Dishes", "Frying",  "Blender",        "Running_water",
    "Vacuum_cleaner", "Electric_shaver_toothbrush"};

std::string clip_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "clip%05d", index);
  return buf;
}

}  // namespace

void validate_spec(const GenSpec& s) {
  if (s.classes < 1 || s.features < 1 || s.frames < 1) {
    throw ValidationError("classes, features and frames must be positive");
  }
  if (!(s.hop_s > 0.0)) throw ValidationError("hop_s must be > 0");
  if (s.min_events < 0 || s.max_events < s.min_events) {
    throw ValidationError("need 0 <= min_events <= max_events");
  }
  if (!(s.min_duration_s > 0.0) || s.max_duration_s < s.min_duration_s) {
    throw ValidationError("need 0 < min_duration_s <= max_duration_s");
  }
  if (s.min_duration_s > s.clip_length_s()) {
    throw ValidationError("min_duration_s exceeds the clip length");
  }
  if (s.min_duration_s < s.hop_s) {
    throw ValidationError("min_duration_s must be at least one frame");
  }
  if (!std::isfinite(s.snr_db)) throw ValidationError("snr_db must be finite");
  if (!(s.jitter_frac >= 0.0)) throw ValidationError("jitter_frac must be >= 0");
}

ClassVocabulary synthetic_vocabulary(int classes) {
  std::vector<std::string> names;
  for (int c = 0; c < classes; ++c) {
    names.push_back(c < 10 ? kDomesticClasses[c] : "class" + std::to_string(c));
  }
  return ClassVocabulary(std::move(names));
}

Matrix class_templates(const GenSpec& spec) {
  std::mt19937_64 rng(spec.seed ^ kTemplateStream);
  std::normal_distribution<double> normal;
  Matrix templates(spec.classes, spec.features);
  for (int c = 0; c < spec.classes; ++c) {
    for (int f = 0; f < spec.features; ++f) templates(c, f) = normal(rng);
    templates.row(c).normalize();
  }
  return templates;
}

double noise_stddev(const GenSpec& spec) {
  return std::sqrt(std::pow(10.0, -spec.snr_db / 10.0) / spec.features);
}

StrongAnnotation jitter(const StrongAnnotation& ann, double sigma_frac,
                        std::uint64_t seed, double clip_length_s,
                        double min_duration_s) {
  if (!(sigma_frac >= 0.0)) throw ValidationError("jitter: sigma must be >= 0");
  StrongAnnotation out = ann;
  if (sigma_frac == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  // Draw in input order so the result does not depend on class grouping.
  std::vector<std::pair<double, double>> shifts;
  for (const auto& e : ann.events) {
    const double sd = sigma_frac * e.duration();
    const double a = normal(rng) * sd;
    const double b = normal(rng) * sd;
    shifts.emplace_back(a, b);
  }

  // Cell of each event: bounded by gap midpoints to same-class neighbours.
  const int n = static_cast<int>(ann.events.size());
  std::vector<double> lo(n, 0.0), hi(n, clip_length_s);
  for (int i = 0; i < n; ++i) {
    const Event& e = ann.events[i];
    for (int j = 0; j < n; ++j) {
      const Event& o = ann.events[j];
      if (j == i || o.class_id != e.class_id) continue;
      if (o.offset_s <= e.onset_s) {
        lo[i] = std::max(lo[i], 0.5 * (o.offset_s + e.onset_s));
      } else if (o.onset_s >= e.offset_s) {
        hi[i] = std::min(hi[i], 0.5 * (e.offset_s + o.onset_s));
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    Event& e = out.events[i];
    if (hi[i] - lo[i] < min_duration_s) continue;  // no room to move safely
    const double onset =
        std::clamp(e.onset_s + shifts[i].first, lo[i], hi[i] - min_duration_s);
    const double offset = std::clamp(e.offset_s + shifts[i].second,
                                     onset + min_duration_s, hi[i]);
    e.onset_s = onset;
    e.offset_s = offset;
  }
  return out;
}

std::vector<SyntheticClip> generate(const GenSpec& spec, int n_clips,
                                    int first_index) {
  validate_spec(spec);
  if (n_clips < 0) throw ValidationError("n_clips must be >= 0");
  const Matrix templates = class_templates(spec);
  const double sd = noise_stddev(spec);
  const int min_len = std::max(
      1, static_cast<int>(std::ceil(spec.min_duration_s / spec.hop_s - 1e-9)));
  const int max_len = std::min(
      spec.frames,
      std::max(min_len, static_cast<int>(
                            std::floor(spec.max_duration_s / spec.hop_s + 1e-9))));

  std::vector<SyntheticClip> clips;
  clips.reserve(n_clips);
  for (int i = first_index; i < first_index + n_clips; ++i) {
    const std::uint64_t clip_seed = spec.seed ^ static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(clip_seed);
    std::uniform_int_distribution<int> count_dist(spec.min_events,
                                                  spec.max_events);
    std::uniform_int_distribution<int> class_dist(0, spec.classes - 1);
    std::uniform_int_distribution<int> len_dist(min_len, max_len);
    std::normal_distribution<double> normal;

    SyntheticClip clip;
    clip.id = clip_name(i);
    std::vector<std::pair<int, int>> spans;  // frames [start, end)
    std::vector<int> span_class;
    const int wanted = count_dist(rng);
    for (int k = 0; k < wanted; ++k) {
      for (int attempt = 0; attempt < 20; ++attempt) {
        const int c = class_dist(rng);
        const int len = len_dist(rng);
        std::uniform_int_distribution<int> start_dist(0, spec.frames - len);
        const int start = start_dist(rng);
        // Same-class events keep at least one silent frame between them.
        bool clash = false;
        for (std::size_t j = 0; j < spans.size(); ++j) {
          if (span_class[j] != c) continue;
          if (start <= spans[j].second && spans[j].first <= start + len) {
            clash = true;
            break;
          }
        }
        if (clash) continue;
        spans.emplace_back(start, start + len);
        span_class.push_back(c);
        break;
      }
    }
    for (std::size_t j = 0; j < spans.size(); ++j) {
      clip.truth.events.push_back(
          {span_class[j], frame_seconds(spans[j].first, spec.hop_s),
           frame_seconds(spans[j].second, spec.hop_s)});
    }
    std::sort(clip.truth.events.begin(), clip.truth.events.end(),
              [](const Event& a, const Event& b) {
                return std::tie(a.onset_s, a.class_id) <
                       std::tie(b.onset_s, b.class_id);
              });

    clip.features.resize(spec.frames, spec.features);
    for (Eigen::Index k = 0; k < clip.features.size(); ++k) {
      clip.features.data()[k] = sd * normal(rng);
    }
    for (std::size_t j = 0; j < spans.size(); ++j) {
      for (int t = spans[j].first; t < spans[j].second; ++t) {
        clip.features.row(t) += templates.row(span_class[j]);
      }
    }

    clip.noisy = jitter(clip.truth, spec.jitter_frac, clip_seed ^ kJitterStream,
                        spec.clip_length_s(), spec.hop_s);
    clip.weak = strong_to_weak(clip.truth, spec.classes);
    clip.sequential = strong_to_sequential(clip.noisy, spec.classes);
    clips.push_back(std::move(clip));
  }
  return clips;
}

Dataset make_dataset(const GenSpec& spec,
                     const std::vector<SyntheticClip>& train,
                     const std::vector<SyntheticClip>& eval,
                     const LabelSet& labels) {
  Dataset data;
  data.num_classes = spec.classes;
  data.num_features = spec.features;
  data.hop_s = spec.hop_s;
  for (const auto& clip : train) {
    LabeledClip lc;
    lc.id = clip.id;
    lc.features = clip.features;
    if (labels.strong) {
      lc.strong = rasterize(clip.noisy, spec.classes,
                            static_cast<int>(clip.features.rows()), spec.hop_s)
                      .activity;
    }
    if (labels.weak) lc.weak = clip.weak;
    if (labels.sequential) lc.sequential = clip.sequential;
    data.train.push_back(std::move(lc));
  }
  for (const auto& clip : eval) {
    data.eval.push_back({clip.id, clip.features, clip.truth});
  }
  return data;
}

void save_dataset(const std::string& dir, const SyntheticDataset& data) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "features");
  nlohmann::json manifest;
  manifest["spec"] = to_json(data.spec);
  manifest["frames"] = data.spec.frames;
  manifest["features"] = data.spec.features;
  manifest["hop_s"] = data.spec.hop_s;
  AnnotationMap truth, noisy;
  for (const auto& [split, clips] : data.splits) {
    auto ids = nlohmann::json::array();
    for (const auto& clip : clips) {
      ids.push_back(clip.id);
      truth[clip.id] = clip.truth;
      noisy[clip.id] = clip.noisy;
      write_doubles((fs::path(dir) / "features" / (clip.id + ".bin")).string(),
                    std::span<const double>(clip.features.data(),
                                            clip.features.size()));
    }
    manifest["splits"][split] = ids;
  }
  atomic_write((fs::path(dir) / "vocab.json").string(),
               vocabulary_to_json(data.vocab).dump(2) + "\n");
  write_annotations((fs::path(dir) / "truth.tsv").string(), truth, data.vocab);
  write_annotations((fs::path(dir) / "noisy.tsv").string(), noisy, data.vocab);
  atomic_write((fs::path(dir) / "manifest.json").string(),
               manifest.dump(2) + "\n");
}

SyntheticDataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  SyntheticDataset data;
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(
        read_file((fs::path(dir) / "manifest.json").string()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(dir + "/manifest.json: " + e.what(), 0);
  }
  data.spec = gen_spec_from_json(manifest.at("spec"));
  data.vocab = vocabulary_from_json(nlohmann::json::parse(
      read_file((fs::path(dir) / "vocab.json").string())));
  const auto truth =
      read_annotations((fs::path(dir) / "truth.tsv").string(), data.vocab);
  const auto noisy =
      read_annotations((fs::path(dir) / "noisy.tsv").string(), data.vocab);
  for (const auto& [split, ids] : manifest.at("splits").items()) {
    auto& clips = data.splits[split];
    for (const auto& id_json : ids) {
      SyntheticClip clip;
      clip.id = id_json.get<std::string>();
      const auto values = read_doubles(
          (fs::path(dir) / "features" / (clip.id + ".bin")).string());
      if (values.size() != static_cast<std::size_t>(data.spec.frames) *
                               data.spec.features) {
        throw ParseError("feature file of " + clip.id + " has wrong size", 0);
      }
      clip.features = Eigen::Map<const Matrix>(values.data(), data.spec.frames,
                                               data.spec.features);
      if (auto it = truth.find(clip.id); it != truth.end()) clip.truth = it->second;
      if (auto it = noisy.find(clip.id); it != noisy.end()) clip.noisy = it->second;
      clip.weak = strong_to_weak(clip.truth, data.spec.classes);
      clip.sequential = strong_to_sequential(clip.noisy, data.spec.classes);
      clips.push_back(std::move(clip));
    }
  }
  return data;
}

}  // namespace seqaed
