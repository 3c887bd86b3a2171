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

// Synthetic clips with controllable annotator timestamp noise.
//
// Each class owns a fixed unit-norm template in feature space. A frame's
// features are white noise plus the templates of every class active in it.
// Reference ("truth") events are frame-aligned; the "noisy" annotation
// shifts every boundary by Gaussian noise proportional to the event duration,
// mimicking annotator disagreement.

#ifndef SEQAED_DATAGEN_H_
#define SEQAED_DATAGEN_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seqaed/labels.h"
#include "seqaed/matrix.h"
#include "seqaed/trainer.h"

namespace seqaed {

struct GenSpec {
  int classes = 4;
  int features = 16;
  int frames = 50;
  double hop_s = 0.2;
  int min_events = 1;
  int max_events = 3;
  double min_duration_s = 1.0;
  double max_duration_s = 4.0;
  // Template energy over total noise energy per frame, in dB.
  double snr_db = 0.0;
  // Boundary noise std as a fraction of the event duration.
  double jitter_frac = 0.15;
  std::uint64_t seed = 0;

  double clip_length_s() const { return frames * hop_s; }
  bool operator==(const GenSpec&) const = default;
};

void validate_spec(const GenSpec& spec);

struct SyntheticClip {
  std::string id;
  Matrix features;  // frames x features
  StrongAnnotation truth;
  StrongAnnotation noisy;
  WeakLabel weak;              // from truth
  SequentialLabel sequential;  // from noisy
};

ClassVocabulary synthetic_vocabulary(int classes);

// classes x features, unit rows, drawn from spec.seed.
Matrix class_templates(const GenSpec& spec);

// Per-frame noise standard deviation implied by spec.snr_db.
double noise_stddev(const GenSpec& spec);

// Clips first_index .. first_index + n_clips - 1. Clip i depends only on
// (spec, i), so disjoint ranges can be generated independently.
std::vector<SyntheticClip> generate(const GenSpec& spec, int n_clips,
                                    int first_index = 0);

// Shifts every boundary by N(0, (sigma_frac * duration)^2), then clamps so
// that each event keeps at least `min_duration_s`, stays inside
// [0, clip_length_s] and does not cross the midpoint of the gap to its
// same-class neighbours. Event count and classes are preserved.
StrongAnnotation jitter(const StrongAnnotation& ann, double sigma_frac,
                        std::uint64_t seed, double clip_length_s,
                        double min_duration_s);

// Which label forms a training clip carries.
struct LabelSet {
  bool strong = true;
  bool weak = false;
  bool sequential = false;
  bool operator==(const LabelSet&) const = default;
};

// Strong targets rasterize the noisy annotation, sequential targets come from
// the noisy annotation, evaluation references are the clean truth.
Dataset make_dataset(const GenSpec& spec, const std::vector<SyntheticClip>& train,
                     const std::vector<SyntheticClip>& eval,
                     const LabelSet& labels);

struct SyntheticDataset {
  GenSpec spec;
  ClassVocabulary vocab;
  std::map<std::string, std::vector<SyntheticClip>> splits;
};

// Layout: manifest.json, vocab.json, truth.tsv, noisy.tsv and
// features/<clip>.bin (frames x features float64, row-major).
void save_dataset(const std::string& dir, const SyntheticDataset& data);
SyntheticDataset load_dataset(const std::string& dir);

}  // namespace seqaed

#endif  // SEQAED_DATAGEN_H_
