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

// A small recurrent tagger used as the trainable model in experiments.
//
//   h_t = tanh(W_x x_t + W_h h_{t-1} + b_h)        (h_{-1} = 0)
//   y_t = sigmoid(W_y h_t + b_y)                   event activity, C outputs
//   q_t = softmax(W_q h_t + b_q)                   blank + 2C boundaries
//
// All parameters live in one flat vector so that optimizers and the mean
// teacher can treat them uniformly.

#ifndef SEQAED_MODEL_H_
#define SEQAED_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "seqaed/matrix.h"

namespace seqaed {

struct ModelShape {
  int features = 0;
  int hidden = 32;
  int classes = 0;
  // Frames of look-back and look-ahead fed to the recurrent layer alongside
  // the current frame (zero padded at the clip edges).
  int context = 0;

  int boundary_outputs() const { return 2 * classes + 1; }
  int input_width() const { return features * (2 * context + 1); }
  bool operator==(const ModelShape&) const = default;
};

// Named slice of the flat parameter vector, row-major.
struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  int offset = 0;
  int size() const { return rows * cols; }
};

// Row t holds frames t - context .. t + context side by side.
Matrix stack_context(const Matrix& features, int context);

class ToyModel {
 public:
  struct Output {
    Matrix hidden;    // T x H
    Matrix activity;  // T x C, sigmoid
    Matrix boundary;  // T x (2C + 1), softmax; empty unless requested
  };

  ToyModel(ModelShape shape, std::uint64_t seed);
  ToyModel(ModelShape shape, Vector params);

  const ModelShape& shape() const { return shape_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  int num_params() const { return static_cast<int>(params_.size()); }
  const Vector& params() const { return params_; }
  Vector& params() { return params_; }

  Output forward(const Matrix& features, bool with_boundary_head) const;

  // Gradient of a loss w.r.t. the flat parameters, given the loss gradient
  // w.r.t. the output probabilities. `d_boundary` may be empty.
  Vector backward(const Matrix& features, const Output& out,
                  const Matrix& d_activity, const Matrix& d_boundary) const;

 private:
  void layout();

  ModelShape shape_;
  std::vector<ParamBlock> blocks_;
  Vector params_;
};

}  // namespace seqaed

#endif  // SEQAED_MODEL_H_
