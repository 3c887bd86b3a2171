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

#ifndef SEQAED_MATRIX_H_
#define SEQAED_MATRIX_H_

#include <Eigen/Core>

namespace seqaed {

// Row-major so that a row is one frame, contiguous in memory.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Scalar loss plus the gradient w.r.t. the matrix the loss was computed from.
struct LossResult {
  double loss = 0.0;
  Matrix grad;
};

}  // namespace seqaed

#endif  // SEQAED_MATRIX_H_
