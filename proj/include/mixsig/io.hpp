// Copyright 2026 The mixsig Authors.
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

#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mixsig/core.hpp"

namespace mixsig::io {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Dense CSV, one matrix row per line, comma separated, no header.
inline void write_matrix_csv(const std::string& path, const Matrix& M) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" +
                      cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  Matrix M(static_cast<Index>(rows.size()),
           rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[i][j];
  return M;
}

/// Single-column CSV of 1-based labels from 0-based labels.
inline void write_labels_csv(const std::string& path,
                             const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (int l : labels) out << (l + 1) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

/// Reads 1-based labels, returns them 0-based.
inline std::vector<int> read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<int> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      const int v = std::stoi(line, &used);
      if (used != line.size() || v < 1) throw std::invalid_argument(line);
      out.push_back(v - 1);
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(lineno) + ": bad label '" +
                    line + "'");
    }
  }
  return out;
}

}  // namespace mixsig::io
