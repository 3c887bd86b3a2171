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

#include "seqaed/model.h"

#include <cmath>
#include <random>

#include "seqaed/errors.h"

namespace seqaed {
namespace {

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

enum BlockId { kWx, kWh, kBh, kWy, kBy, kWq, kBq };

}  // namespace

Matrix stack_context(const Matrix& features, int context) {
  if (context == 0) return features;
  const Eigen::Index frames = features.rows(), width = features.cols();
  Matrix out = Matrix::Zero(frames, width * (2 * context + 1));
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int k = -context; k <= context; ++k) {
      const Eigen::Index src = t + k;
      if (src < 0 || src >= frames) continue;
      out.block(t, (k + context) * width, 1, width) = features.row(src);
    }
  }
  return out;
}

ToyModel::ToyModel(ModelShape shape, std::uint64_t seed) : shape_(shape) {
  layout();
  std::mt19937_64 rng(seed);
  auto fill_uniform = [&](const ParamBlock& b, double limit) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (int i = 0; i < b.size(); ++i) params_[b.offset + i] = dist(rng);
  };
  const double h = shape_.hidden;
  fill_uniform(blocks_[kWx], std::sqrt(6.0 / (shape_.input_width() + h)));
  fill_uniform(blocks_[kWh], 0.5 * std::sqrt(3.0 / h));
  fill_uniform(blocks_[kWy], std::sqrt(6.0 / (h + shape_.classes)));
  fill_uniform(blocks_[kWq], std::sqrt(6.0 / (h + shape_.boundary_outputs())));
}

ToyModel::ToyModel(ModelShape shape, Vector params) : shape_(shape) {
  layout();
  if (params.size() != params_.size()) {
    throw ValidationError("model parameter count mismatch: expected " +
                          std::to_string(params_.size()) + ", got " +
                          std::to_string(params.size()));
  }
  params_ = std::move(params);
}

void ToyModel::layout() {
  if (shape_.features < 1 || shape_.hidden < 1 || shape_.classes < 1) {
    throw ValidationError("model dimensions must be positive");
  }
  if (shape_.context < 0) throw ValidationError("context must be >= 0");
  const int f = shape_.input_width(), h = shape_.hidden, c = shape_.classes;
  const int q = shape_.boundary_outputs();
  int offset = 0;
  auto add = [&](std::string name, int rows, int cols) {
    blocks_.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  add("W_x", h, f);
  add("W_h", h, h);
  add("b_h", 1, h);
  add("W_y", c, h);
  add("b_y", 1, c);
  add("W_q", q, h);
  add("b_q", 1, q);
  params_ = Vector::Zero(offset);
}

ToyModel::Output ToyModel::forward(const Matrix& features,
                                   bool with_boundary_head) const {
  if (features.cols() != shape_.features) {
    throw ValidationError("feature width " + std::to_string(features.cols()) +
                          " does not match model input " +
                          std::to_string(shape_.features));
  }
  auto block = [&](BlockId id) {
    const auto& b = blocks_[id];
    return ConstMap(params_.data() + b.offset, b.rows, b.cols);
  };
  const int frames = static_cast<int>(features.rows());
  Output out;
  Matrix pre = stack_context(features, shape_.context) * block(kWx).transpose();
  pre.rowwise() += block(kBh).row(0);
  out.hidden.resize(frames, shape_.hidden);
  const auto wh = block(kWh);
  for (int t = 0; t < frames; ++t) {
    RowVector a = pre.row(t);
    if (t > 0) a.noalias() += out.hidden.row(t - 1) * wh.transpose();
    out.hidden.row(t) = a.array().tanh();
  }
  Matrix logits = out.hidden * block(kWy).transpose();
  logits.rowwise() += block(kBy).row(0);
  out.activity = (1.0 + (-logits.array()).exp()).inverse().matrix();
  if (with_boundary_head) {
    Matrix q = out.hidden * block(kWq).transpose();
    q.rowwise() += block(kBq).row(0);
    for (int t = 0; t < frames; ++t) {
      const double m = q.row(t).maxCoeff();
      q.row(t) = (q.row(t).array() - m).exp();
      q.row(t) /= q.row(t).sum();
    }
    out.boundary = std::move(q);
  }
  return out;
}

Vector ToyModel::backward(const Matrix& features, const Output& out,
                          const Matrix& d_activity,
                          const Matrix& d_boundary) const {
  auto block = [&](BlockId id) {
    const auto& b = blocks_[id];
    return ConstMap(params_.data() + b.offset, b.rows, b.cols);
  };
  Vector grad = Vector::Zero(params_.size());
  auto gblock = [&](BlockId id) {
    const auto& b = blocks_[id];
    return MutMap(grad.data() + b.offset, b.rows, b.cols);
  };
  const int frames = static_cast<int>(features.rows());

  const Matrix d_logit =
      (d_activity.array() * out.activity.array() *
       (1.0 - out.activity.array()))
          .matrix();
  gblock(kWy).noalias() = d_logit.transpose() * out.hidden;
  gblock(kBy) = d_logit.colwise().sum();
  Matrix d_hidden = d_logit * block(kWy);

  if (d_boundary.size() > 0) {
    if (out.boundary.size() == 0) {
      throw ValidationError("boundary gradient given without boundary output");
    }
    // Softmax Jacobian-vector product, row by row.
    const Eigen::VectorXd inner =
        (out.boundary.array() * d_boundary.array()).rowwise().sum();
    Matrix d_q = out.boundary.array() *
                 (d_boundary.array().colwise() - inner.array());
    gblock(kWq).noalias() = d_q.transpose() * out.hidden;
    gblock(kBq) = d_q.colwise().sum();
    d_hidden.noalias() += d_q * block(kWq);
  }

  const Matrix inputs = stack_context(features, shape_.context);
  auto g_wx = gblock(kWx);
  auto g_wh = gblock(kWh);
  auto g_bh = gblock(kBh);
  const auto wh = block(kWh);
  RowVector carry = RowVector::Zero(shape_.hidden);
  for (int t = frames - 1; t >= 0; --t) {
    const RowVector dh = d_hidden.row(t) + carry;
    const RowVector d_pre =
        (dh.array() * (1.0 - out.hidden.row(t).array().square())).matrix();
    g_wx.noalias() += d_pre.transpose() * inputs.row(t);
    if (t > 0) g_wh.noalias() += d_pre.transpose() * out.hidden.row(t - 1);
    g_bh += d_pre;
    carry.noalias() = d_pre * wh;
  }
  return grad;
}

}  // namespace seqaed
