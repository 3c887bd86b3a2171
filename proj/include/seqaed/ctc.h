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

// CTC over the event-boundary alphabet.
//
// The posteriorgram has 2*C + 1 columns: column 0 is blank and column
// 1 + symbol.index() holds onset_c (2c) / offset_c (2c + 1).

#ifndef SEQAED_CTC_H_
#define SEQAED_CTC_H_

#include <vector>

#include "seqaed/labels.h"
#include "seqaed/matrix.h"

namespace seqaed {

inline constexpr int kCtcBlank = 0;

inline int ctc_column(const BoundarySymbol& s) { return 1 + s.index(); }

struct CtcOptions {
  // Reject rows that are not probability distributions. Gradient checks
  // perturb single entries and turn this off.
  bool require_stochastic = true;
  double row_tolerance = 1e-6;
};

// Frames needed to emit `target`: its length plus one separating blank per
// pair of adjacent identical symbols.
int ctc_min_frames(const SequentialLabel& target);

// Throws ValidationError for wrong width, entries outside [0, 1] or row sums
// off by more than `row_tolerance`.
void validate_ctc_posteriorgram(const Matrix& probs, int num_classes,
                                double row_tolerance = 1e-6);

// Negative log-likelihood of `target` and its gradient w.r.t. `probs`
// (not logits). Throws InfeasibleTargetError when T < ctc_min_frames(target).
// A target that is feasible in length but has zero probability yields
// loss = +inf and an all-zero gradient.
LossResult ctc_loss(const Matrix& probs, const SequentialLabel& target,
                    const CtcOptions& options = {});

struct AlignedSymbol {
  BoundarySymbol symbol;
  int frame = 0;
  bool operator==(const AlignedSymbol&) const = default;
};

// Best-path decoding: per-frame argmax, merge repeats, drop blanks. Each
// symbol carries the first frame of its run.
std::vector<AlignedSymbol> ctc_greedy_decode_aligned(const Matrix& probs);
SequentialLabel ctc_greedy_decode(const Matrix& probs);

}  // namespace seqaed

#endif  // SEQAED_CTC_H_
