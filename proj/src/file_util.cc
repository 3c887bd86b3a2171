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

#include "seqaed/file_util.h"

#include <bit>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "seqaed/errors.h"

namespace seqaed {

static_assert(std::endian::native == std::endian::little,
              "binary matrix files assume a little-endian host");

void atomic_write(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_doubles(const std::string& path, std::span<const double> values) {
  atomic_write(path,
               std::string_view(reinterpret_cast<const char*>(values.data()),
                                values.size_bytes()));
}

std::vector<double> read_doubles(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() % sizeof(double) != 0) {
    throw ParseError(path + ": size is not a multiple of 8 bytes", 0);
  }
  std::vector<double> values(bytes.size() / sizeof(double));
  std::copy(bytes.begin(), bytes.end(),
            reinterpret_cast<char*>(values.data()));
  return values;
}

std::string format_seconds(double seconds) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), seconds);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  std::string text(buf, end);
  if (text.find_first_of("eE") != std::string::npos) {
    // Tiny or huge values; fall back to fixed notation.
    std::snprintf(buf, sizeof(buf), "%.17f", seconds);
    text = buf;
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return text + ".00";
  const auto decimals = text.size() - dot - 1;
  if (decimals < 2) text.append(2 - decimals, '0');
  return text;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(start));
      return parts;
    }
    parts.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace seqaed
