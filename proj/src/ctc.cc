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

#include "seqaed/ctc.h"

#include <cmath>
#include <string>

#include "seqaed/errors.h"
#include "seqaed/log_math.h"

namespace seqaed {

int ctc_min_frames(const SequentialLabel& target) {
  int frames = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++frames;
  }
  return frames;
}

void validate_ctc_posteriorgram(const Matrix& probs, int num_classes,
                                double row_tolerance) {
  if (probs.cols() != 2 * num_classes + 1) {
    throw ValidationError("CTC posteriorgram needs " +
                          std::to_string(2 * num_classes + 1) +
                          " columns, got " + std::to_string(probs.cols()));
  }
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < probs.cols(); ++k) {
      const double p = probs(t, k);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("CTC probability outside [0, 1] at frame " +
                              std::to_string(t));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > row_tolerance) {
      throw ValidationError("CTC row " + std::to_string(t) +
                            " does not sum to 1 (sum=" + std::to_string(sum) +
                            ")");
    }
  }
}

LossResult ctc_loss(const Matrix& probs, const SequentialLabel& target,
                    const CtcOptions& options) {
  const int frames = static_cast<int>(probs.rows());
  const int alphabet = static_cast<int>(probs.cols());
  if (frames < 1) throw ValidationError("ctc_loss: empty posteriorgram");
  if (alphabet % 2 != 1) {
    throw ValidationError("ctc_loss: column count must be 2C + 1");
  }
  for (const auto& s : target) {
    if (s.class_id < 0 || ctc_column(s) >= alphabet) {
      throw ValidationError("ctc_loss: target symbol outside the alphabet");
    }
  }
  if (options.require_stochastic) {
    validate_ctc_posteriorgram(probs, (alphabet - 1) / 2,
                               options.row_tolerance);
  }
  const int required = ctc_min_frames(target);
  if (frames < required) {
    throw InfeasibleTargetError("ctc_loss: " + std::to_string(frames) +
                                    " frames cannot emit a target needing " +
                                    std::to_string(required),
                                frames, required);
  }

  // Extended target: blank, l1, blank, l2, ..., lS, blank.
  const int ext_len = 2 * static_cast<int>(target.size()) + 1;
  std::vector<int> ext(ext_len, kCtcBlank);
  for (std::size_t i = 0; i < target.size(); ++i) {
    ext[2 * i + 1] = ctc_column(target[i]);
  }
  auto can_skip = [&](int u) {
    return ext[u] != kCtcBlank && u >= 2 && ext[u] != ext[u - 2];
  };

  Matrix log_probs(frames, alphabet);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < alphabet; ++k) log_probs(t, k) = safe_log(probs(t, k));
  }

  // pre_alpha(t, u): paths reaching state u at frame t, before the frame-t
  // emission. alpha = pre_alpha + emission.
  Matrix pre_alpha = Matrix::Constant(frames, ext_len, kLogZero);
  Matrix alpha = Matrix::Constant(frames, ext_len, kLogZero);
  pre_alpha(0, 0) = 0.0;
  if (ext_len > 1) pre_alpha(0, 1) = 0.0;
  for (int t = 0; t < frames; ++t) {
    for (int u = 0; u < ext_len; ++u) {
      if (t > 0) {
        double acc = alpha(t - 1, u);
        if (u >= 1) acc = log_add(acc, alpha(t - 1, u - 1));
        if (can_skip(u)) acc = log_add(acc, alpha(t - 1, u - 2));
        pre_alpha(t, u) = acc;
      }
      if (pre_alpha(t, u) != kLogZero) {
        alpha(t, u) = pre_alpha(t, u) + log_probs(t, ext[u]);
      }
    }
  }
  double log_likelihood = alpha(frames - 1, ext_len - 1);
  if (ext_len > 1) {
    log_likelihood = log_add(log_likelihood, alpha(frames - 1, ext_len - 2));
  }

  LossResult result;
  result.grad = Matrix::Zero(frames, alphabet);
  if (log_likelihood == kLogZero) {
    result.loss = std::numeric_limits<double>::infinity();
    return result;
  }
  result.loss = -log_likelihood;

  // beta(t, u): probability of frames t+1.. given state u at frame t.
  Matrix beta = Matrix::Constant(frames, ext_len, kLogZero);
  beta(frames - 1, ext_len - 1) = 0.0;
  if (ext_len > 1) beta(frames - 1, ext_len - 2) = 0.0;
  for (int t = frames - 2; t >= 0; --t) {
    for (int u = 0; u < ext_len; ++u) {
      double acc = beta(t + 1, u) + log_probs(t + 1, ext[u]);
      if (u + 1 < ext_len) {
        acc = log_add(acc, beta(t + 1, u + 1) + log_probs(t + 1, ext[u + 1]));
      }
      if (u + 2 < ext_len && can_skip(u + 2)) {
        acc = log_add(acc, beta(t + 1, u + 2) + log_probs(t + 1, ext[u + 2]));
      }
      beta(t, u) = acc;
    }
  }

  // d P / d y_t(k) = sum over states u with label k of pre_alpha * beta.
  Matrix log_occupancy = Matrix::Constant(frames, alphabet, kLogZero);
  for (int t = 0; t < frames; ++t) {
    for (int u = 0; u < ext_len; ++u) {
      const double a = pre_alpha(t, u);
      const double b = beta(t, u);
      if (a == kLogZero || b == kLogZero) continue;
      log_occupancy(t, ext[u]) = log_add(log_occupancy(t, ext[u]), a + b);
    }
  }
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < alphabet; ++k) {
      if (log_occupancy(t, k) != kLogZero) {
        result.grad(t, k) = -std::exp(log_occupancy(t, k) - log_likelihood);
      }
    }
  }
  return result;
}

std::vector<AlignedSymbol> ctc_greedy_decode_aligned(const Matrix& probs) {
  std::vector<AlignedSymbol> out;
  int prev = -1;
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    int k = 0;
    for (int j = 1; j < probs.cols(); ++j) {
      if (probs(t, j) > probs(t, k)) k = j;
    }
    if (k != prev && k != kCtcBlank) {
      out.push_back({BoundarySymbol::from_index(k - 1), static_cast<int>(t)});
    }
    prev = k;
  }
  return out;
}

SequentialLabel ctc_greedy_decode(const Matrix& probs) {
  SequentialLabel label;
  for (const auto& a : ctc_greedy_decode_aligned(probs)) {
    label.push_back(a.symbol);
  }
  return label;
}

}  // namespace seqaed
