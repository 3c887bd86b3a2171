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

#include "seqaed/ctl.h"

#include <cmath>
#include <limits>
#include <string>

#include "seqaed/errors.h"
#include "seqaed/log_math.h"

namespace seqaed {
namespace {

// Log-domain summary of one z row. Entries equal to 1 are counted rather
// than logged so that products excluding them stay exact.
struct RowLogStats {
  double sum_log_complement = 0.0;  // sum of log(1 - z_j) over z_j < 1
  int saturated = 0;                // number of z_j >= 1
};

RowLogStats row_stats(std::span<const double> z) {
  RowLogStats stats;
  for (double v : z) {
    if (v >= 1.0) {
      ++stats.saturated;
    } else {
      stats.sum_log_complement += std::log1p(-v);
    }
  }
  return stats;
}

double log_no_boundary(const RowLogStats& s) {
  return s.saturated > 0 ? kLogZero : s.sum_log_complement;
}

double log_emission(const RowLogStats& s, std::span<const double> z,
                    int label) {
  const double zl = z[label];
  if (zl <= 0.0) return kLogZero;
  double rest;
  if (zl >= 1.0) {
    rest = s.saturated > 1 ? kLogZero : s.sum_log_complement;
  } else {
    rest = s.saturated > 0 ? kLogZero
                           : s.sum_log_complement - std::log1p(-zl);
  }
  return rest == kLogZero ? kLogZero : std::log(zl) + rest;
}

double product_excluding(std::span<const double> z, int a, int b) {
  double prod = 1.0;
  for (int j = 0; j < static_cast<int>(z.size()); ++j) {
    if (j != a && j != b) prod *= 1.0 - z[j];
  }
  return prod;
}

}  // namespace

Matrix rectified_delta(const Matrix& y, const CtlOptions& options) {
  const int frames = static_cast<int>(y.rows());
  const int classes = static_cast<int>(y.cols());
  const int rows = frames + (options.close_at_end ? 1 : 0);
  Matrix z = Matrix::Zero(rows, 2 * classes);
  for (int t = 0; t < rows; ++t) {
    for (int c = 0; c < classes; ++c) {
      const double prev = t > 0 ? y(t - 1, c) : 0.0;
      const double cur = t < frames ? y(t, c) : 0.0;
      z(t, 2 * c) = std::max(0.0, cur - prev);
      z(t, 2 * c + 1) = std::max(0.0, prev - cur);
    }
  }
  return z;
}

double no_boundary_prob(std::span<const double> z_row) {
  double prod = 1.0;
  for (double v : z_row) prod *= 1.0 - v;
  return prod;
}

double boundary_emission_prob(std::span<const double> z_row, int label) {
  return z_row[label] * product_excluding(z_row, label, label);
}

double boundary_emission_prob_factored(std::span<const double> z_row,
                                       int label) {
  const double zl = z_row[label];
  if (zl >= 1.0) {
    throw ValidationError("factored emission probability needs z < 1");
  }
  return no_boundary_prob(z_row) * (zl / (1.0 - zl));
}

LossResult ctl_loss_from_boundaries(const Matrix& z,
                                    const SequentialLabel& target) {
  const int frames = static_cast<int>(z.rows());
  const int labels = static_cast<int>(z.cols());
  const int len = static_cast<int>(target.size());
  for (const auto& s : target) {
    if (s.class_id < 0 || s.index() >= labels) {
      throw ValidationError("ctl_loss: target symbol outside the alphabet");
    }
  }
  if (frames < len) {
    throw InfeasibleTargetError("ctl_loss: " + std::to_string(frames) +
                                    " frames cannot emit " +
                                    std::to_string(len) + " boundaries",
                                frames, len);
  }

  std::vector<double> log_eps(frames);
  // log_emit(t, s) = log p_t(l_s) for s = 1..len (column 0 unused).
  Matrix log_emit = Matrix::Constant(frames, len + 1, kLogZero);
  for (int t = 0; t < frames; ++t) {
    std::span<const double> row(z.row(t).data(), labels);
    const RowLogStats stats = row_stats(row);
    log_eps[t] = log_no_boundary(stats);
    for (int s = 1; s <= len; ++s) {
      log_emit(t, s) = log_emission(stats, row, target[s - 1].index());
    }
  }

  // alpha(t, s): first t frames emitted exactly the first s symbols.
  Matrix alpha = Matrix::Constant(frames + 1, len + 1, kLogZero);
  alpha(0, 0) = 0.0;
  for (int t = 0; t < frames; ++t) {
    for (int s = 0; s <= len; ++s) {
      double acc = alpha(t, s) + log_eps[t];
      if (s >= 1) acc = log_add(acc, alpha(t, s - 1) + log_emit(t, s));
      alpha(t + 1, s) = std::isnan(acc) ? kLogZero : acc;
    }
  }
  const double log_likelihood = alpha(frames, len);

  LossResult result;
  result.grad = Matrix::Zero(frames, labels);
  if (log_likelihood == kLogZero) {
    result.loss = std::numeric_limits<double>::infinity();
    return result;
  }
  result.loss = -log_likelihood;

  // beta(t, s): frames t.. emit symbols s+1..len.
  Matrix beta = Matrix::Constant(frames + 1, len + 1, kLogZero);
  beta(frames, len) = 0.0;
  for (int t = frames - 1; t >= 0; --t) {
    for (int s = 0; s <= len; ++s) {
      double acc = log_eps[t] + beta(t + 1, s);
      if (s < len) acc = log_add(acc, log_emit(t, s + 1) + beta(t + 1, s + 1));
      beta(t, s) = std::isnan(acc) ? kLogZero : acc;
    }
  }

  // The likelihood is linear in each frame's (eps_t, p_t(.)):
  //   P = eps_t * A_t + sum_l p_t(l) * B_t(l).
  std::vector<double> emit_weight(labels);
  for (int t = 0; t < frames; ++t) {
    double log_a = kLogZero;
    std::vector<double> log_b(labels, kLogZero);
    for (int s = 0; s <= len; ++s) {
      log_a = log_add(log_a, alpha(t, s) + beta(t + 1, s));
      if (s >= 1) {
        const int l = target[s - 1].index();
        log_b[l] = log_add(log_b[l], alpha(t, s - 1) + beta(t + 1, s));
      }
    }
    const double a = log_a == kLogZero ? 0.0 : std::exp(log_a - log_likelihood);
    for (int l = 0; l < labels; ++l) {
      emit_weight[l] =
          log_b[l] == kLogZero ? 0.0 : std::exp(log_b[l] - log_likelihood);
    }
    std::span<const double> row(z.row(t).data(), labels);
    for (int k = 0; k < labels; ++k) {
      const double excl_k = product_excluding(row, k, k);
      // -dP/dz_k / P
      double g = a * excl_k - emit_weight[k] * excl_k;
      for (int l = 0; l < labels; ++l) {
        if (l == k || emit_weight[l] == 0.0) continue;
        g += emit_weight[l] * row[l] * product_excluding(row, l, k);
      }
      result.grad(t, k) = g;
    }
  }
  return result;
}

LossResult ctl_loss(const Matrix& y, const SequentialLabel& target,
                    const CtlOptions& options) {
  const int frames = static_cast<int>(y.rows());
  const int classes = static_cast<int>(y.cols());
  if (frames < 1) throw ValidationError("ctl_loss: empty posteriorgram");
  const Matrix z = rectified_delta(y, options);
  LossResult zres = ctl_loss_from_boundaries(z, target);

  LossResult result;
  result.loss = zres.loss;
  result.grad = Matrix::Zero(frames, classes);
  const Matrix& gz = zres.grad;
  for (int t = 0; t < static_cast<int>(z.rows()); ++t) {
    for (int c = 0; c < classes; ++c) {
      const double prev = t > 0 ? y(t - 1, c) : 0.0;
      const double cur = t < frames ? y(t, c) : 0.0;
      double g_cur = 0.0;  // d loss / d cur
      if (cur > prev) {
        g_cur = gz(t, 2 * c);
      } else if (cur < prev) {
        g_cur = -gz(t, 2 * c + 1);
      }
      if (t < frames) result.grad(t, c) += g_cur;
      if (t > 0) result.grad(t - 1, c) -= g_cur;
    }
  }
  return result;
}

std::vector<AlignedSymbol> ctl_decode_aligned(const Matrix& y,
                                              double threshold,
                                              const CtlOptions& options) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("ctl_decode: threshold must lie in (0, 1)");
  }
  const Matrix z = rectified_delta(y, options);
  std::vector<AlignedSymbol> out;
  for (int t = 0; t < static_cast<int>(z.rows()); ++t) {
    int best = 0;
    for (int l = 1; l < z.cols(); ++l) {
      if (z(t, l) > z(t, best)) best = l;
    }
    if (z.cols() > 0 && z(t, best) >= threshold) {
      out.push_back({BoundarySymbol::from_index(best), t});
    }
  }
  return out;
}

SequentialLabel ctl_decode(const Matrix& y, double threshold,
                           const CtlOptions& options) {
  SequentialLabel label;
  for (const auto& a : ctl_decode_aligned(y, threshold, options)) {
    label.push_back(a.symbol);
  }
  return label;
}

}  // namespace seqaed
