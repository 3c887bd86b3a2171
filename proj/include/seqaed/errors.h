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

#ifndef SEQAED_ERRORS_H_
#define SEQAED_ERRORS_H_

#include <stdexcept>
#include <string>

namespace seqaed {

// Input violates a documented invariant (bad annotation, non-stochastic rows,
// shape mismatch, invalid config).
// `line()` is the 1-based input row when the error came from a file, else 0.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what, int line = 0)
      : std::invalid_argument(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// The target sequence cannot be aligned to the given number of frames.
class InfeasibleTargetError : public std::domain_error {
 public:
  InfeasibleTargetError(const std::string& what, int frames, int required)
      : std::domain_error(what), frames_(frames), required_(required) {}
  int frames() const { return frames_; }
  int required() const { return required_; }

 private:
  int frames_;
  int required_;
};

// A NaN or infinity appeared during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace seqaed

#endif  // SEQAED_ERRORS_H_
