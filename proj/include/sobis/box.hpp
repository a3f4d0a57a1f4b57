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

#ifndef SOBIS_BOX_HPP
#define SOBIS_BOX_HPP

#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sobis {

using Point = std::vector<double>;
using Rng = std::mt19937_64;

/// Axis-aligned hyper-rectangle, the support of every density in this library.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box(std::vector<double> lo, std::vector<double> up) : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.empty() || lower.size() != upper.size()) {
      throw std::invalid_argument("Box: bounds must be nonempty and of equal dimension");
    }
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (!(lower[j] < upper[j])) {
        throw std::invalid_argument("Box: lower[" + std::to_string(j) + "] must be < upper[" + std::to_string(j) +
                                    "]");
      }
    }
  }

  static Box unit_cube(std::size_t dim) {
    return Box(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
  }

  std::size_t dim() const { return lower.size(); }

  double volume() const {
    double v = 1.0;
    for (std::size_t j = 0; j < dim(); ++j) {
      v *= upper[j] - lower[j];
    }
    return v;
  }

  bool contains(const Point& x) const {
    if (x.size() != dim()) {
      return false;
    }
    for (std::size_t j = 0; j < dim(); ++j) {
      if (x[j] < lower[j] || x[j] > upper[j]) {
        return false;
      }
    }
    return true;
  }

  /// Sub-box spanned by the given zero-based axes.
  Box select(const std::vector<std::size_t>& axes) const {
    std::vector<double> lo, up;
    lo.reserve(axes.size());
    up.reserve(axes.size());
    for (auto j : axes) {
      lo.push_back(lower.at(j));
      up.push_back(upper.at(j));
    }
    return Box(std::move(lo), std::move(up));
  }
};

}  // namespace sobis

#endif  // SOBIS_BOX_HPP
