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

// Connectionist temporal localization (CTL).
//
// Boundary probabilities come from frame-level event activity y (T x C,
// multi-label) through a rectified delta:
//   z_t(onset_c)  = max(0, y_t(c) - y_{t-1}(c))
//   z_t(offset_c) = max(0, y_{t-1}(c) - y_t(c))
// with y_{-1} = 0. Boundaries are treated as independent, so a frame emits
// nothing with probability eps_t = prod_l (1 - z_t(l)) and exactly one boundary
// l with probability p_t(l) = z_t(l) * prod_{l' != l} (1 - z_t(l')). At most
// one boundary is emitted per frame and no blank symbol is needed.

#ifndef SEQAED_CTL_H_
#define SEQAED_CTL_H_

#include <span>
#include <vector>

#include "seqaed/ctc.h"
#include "seqaed/labels.h"
#include "seqaed/matrix.h"

namespace seqaed {

struct CtlOptions {
  // Append a virtual frame with y_T = 0 so an event still active in the last
  // frame can emit its offset.
  bool close_at_end = false;
};

// (T or T + 1) x 2C matrix, columns ordered by BoundarySymbol::index().
Matrix rectified_delta(const Matrix& y, const CtlOptions& options = {});

// eps_t for one row of z.
double no_boundary_prob(std::span<const double> z_row);

// p_t(l) as z_l times the product of (1 - z) over the other labels. Finite
// even when z_l = 1.
double boundary_emission_prob(std::span<const double> z_row, int label);

// p_t(l) = eps_t * z_l / (1 - z_l). Requires z_l < 1.
double boundary_emission_prob_factored(std::span<const double> z_row,
                                       int label);

// Negative log-likelihood of `target` given boundary probabilities z and
// its gradient w.r.t. z. Throws InfeasibleTargetError when z has fewer rows
// than `target` has symbols.
LossResult ctl_loss_from_boundaries(const Matrix& z,
                                    const SequentialLabel& target);

// CTL loss with the gradient chained through the rectified delta to y
// (subgradient 0 where consecutive frames are equal).
LossResult ctl_loss(const Matrix& y, const SequentialLabel& target,
                    const CtlOptions& options = {});

// Emits the strongest boundary of each frame when its z reaches `threshold`.
std::vector<AlignedSymbol> ctl_decode_aligned(const Matrix& y,
                                              double threshold,
                                              const CtlOptions& options = {});
SequentialLabel ctl_decode(const Matrix& y, double threshold,
                           const CtlOptions& options = {});

}  // namespace seqaed

#endif  // SEQAED_CTL_H_
