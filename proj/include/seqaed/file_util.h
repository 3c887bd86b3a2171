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

#ifndef SEQAED_FILE_UTIL_H_
#define SEQAED_FILE_UTIL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seqaed {

// Writes to `path + ".tmp"` then renames over `path`.
void atomic_write(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);

// Flat little-endian float64 array.
void write_doubles(const std::string& path, std::span<const double> values);
std::vector<double> read_doubles(const std::string& path);

// Shortest round-trip decimal with at least two fractional digits.
std::string format_seconds(double seconds);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace seqaed

#endif  // SEQAED_FILE_UTIL_H_
