// Copyright 2026 the sobis authors
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

#ifndef SOBIS_DATASET_HPP
#define SOBIS_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobis/box.hpp"
#include "sobis/subset.hpp"

namespace sobis {

/// Inward clamp applied to standardized coordinates, keeping Beta pdfs with
/// shapes below 1 finite at the support endpoints.
inline constexpr double kStandardizeEps = 1e-9;

/// An input/output sample table: n rows of k inputs plus one output.
struct Dataset {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> x;  // row-major, n * k
  std::vector<double> y;
  Box box = Box::unit_cube(1);
  std::vector<std::string> column_names;

  double xat(std::size_t i, std::size_t j) const { return x[i * k + j]; }

  Point row(std::size_t i) const { return Point(x.begin() + static_cast<long>(i * k), x.begin() + static_cast<long>((i + 1) * k)); }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = xat(i, j);
    }
    return col;
  }

  /// Rows restricted to the coordinates of u, as an n x |u| table.
  std::vector<Point> rows_subset(const SubsetIndex& u) const {
    const auto axes = u.axes();
    std::vector<Point> out(n, Point(axes.size()));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < axes.size(); ++c) {
        out[i][c] = xat(i, axes[c]);
      }
    }
    return out;
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.push_back("");
  }
  return cells;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("CSV: non-numeric cell '" + s + "' at line " + std::to_string(line_no));
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
    ++pos;
  }
  if (pos != s.size()) {
    throw std::runtime_error("CSV: non-numeric cell '" + s + "' at line " + std::to_string(line_no));
  }
  return v;
}

}  // namespace detail

/// Load a dataset from CSV: header row, k input columns followed by one
/// output column. Bounds default to the per-column min/max; pass explicit
/// bounds to override (they must match k).
inline Dataset load_dataset(const std::string& path, const Box* bounds = nullptr) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_dataset: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_dataset: empty file '" + path + "'");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const auto header = detail::split_csv_line(line);
  if (header.size() < 2) {
    throw std::runtime_error("load_dataset: need at least one input column and one output column");
  }
  const std::size_t k = header.size() - 1;
  if (bounds && bounds->dim() != k) {
    throw std::runtime_error("load_dataset: declared bounds dimension does not match the header columns");
  }
  Dataset data;
  data.k = k;
  data.column_names = header;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != k + 1) {
      throw std::runtime_error("load_dataset: malformed row at line " + std::to_string(line_no) + " (expected " +
                               std::to_string(k + 1) + " cells, got " + std::to_string(cells.size()) + ")");
    }
    for (std::size_t j = 0; j < k; ++j) {
      data.x.push_back(detail::parse_double(cells[j], line_no));
    }
    data.y.push_back(detail::parse_double(cells[k], line_no));
  }
  data.n = data.y.size();
  if (data.n < 2) {
    throw std::runtime_error("load_dataset: need at least 2 rows, got " + std::to_string(data.n));
  }
  if (bounds) {
    data.box = *bounds;
  } else {
    std::vector<double> lo(k, std::numeric_limits<double>::infinity());
    std::vector<double> up(k, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < data.n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        lo[j] = std::min(lo[j], data.xat(i, j));
        up[j] = std::max(up[j], data.xat(i, j));
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (!(lo[j] < up[j])) {
        // Degenerate column; widen so the Box stays valid.
        up[j] = lo[j] + 1.0;
      }
    }
    data.box = Box(std::move(lo), std::move(up));
  }
  return data;
}

/// Write a dataset as CSV with 17 significant digits (round-trip exact).
inline void write_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_dataset: cannot open '" + path + "' for writing");
  }
  if (data.column_names.size() == data.k + 1) {
    for (std::size_t j = 0; j <= data.k; ++j) {
      out << (j ? "," : "") << data.column_names[j];
    }
  } else {
    for (std::size_t j = 0; j < data.k; ++j) {
      out << (j ? "," : "") << "x" << (j + 1);
    }
    out << ",y";
  }
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.k; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.xat(i, j));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", data.y[i]);
    out << buf << "\n";
  }
  if (!out) {
    throw std::runtime_error("write_dataset: I/O failure writing '" + path + "'");
  }
}

/// Affinely map each input column to [0, 1] using the given bounds, then
/// clamp inward to [eps, 1 - eps]. Rows outside the bounds are an error.
inline Dataset standardize(const Dataset& data, const Box& bounds) {
  if (bounds.dim() != data.k) {
    throw std::invalid_argument("standardize: bounds dimension mismatch");
  }
  std::vector<std::size_t> offending;
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.k; ++j) {
      const double v = data.xat(i, j);
      if (v < bounds.lower[j] || v > bounds.upper[j]) {
        offending.push_back(i);
        break;
      }
    }
  }
  if (!offending.empty()) {
    std::string msg = "standardize: rows outside bounds:";
    for (std::size_t c = 0; c < std::min<std::size_t>(offending.size(), 10); ++c) {
      msg += " " + std::to_string(offending[c]);
    }
    if (offending.size() > 10) {
      msg += " ... (" + std::to_string(offending.size()) + " total)";
    }
    throw std::runtime_error(msg);
  }
  Dataset out = data;
  for (std::size_t j = 0; j < data.k; ++j) {
    const double width = bounds.upper[j] - bounds.lower[j];
    for (std::size_t i = 0; i < data.n; ++i) {
      const double t = (data.xat(i, j) - bounds.lower[j]) / width;
      out.x[i * data.k + j] = std::clamp(t, kStandardizeEps, 1.0 - kStandardizeEps);
    }
  }
  out.box = Box::unit_cube(data.k);
  return out;
}

}  // namespace sobis

#endif  // SOBIS_DATASET_HPP
