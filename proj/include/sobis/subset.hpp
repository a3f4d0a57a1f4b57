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

#ifndef SOBIS_SUBSET_HPP
#define SOBIS_SUBSET_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "sobis/box.hpp"

namespace sobis {

/// An index set u of input coordinates (1-based, as in x1..xk) together with
/// the ambient dimension k. The complement is always derived, never stored.
class SubsetIndex {
 public:
  SubsetIndex(std::vector<int> indices, int k) : u_(std::move(indices)), k_(k) {
    if (k_ < 1) {
      throw std::invalid_argument("SubsetIndex: k must be >= 1");
    }
    if (u_.empty()) {
      throw std::invalid_argument("SubsetIndex: u must be nonempty");
    }
    std::sort(u_.begin(), u_.end());
    if (std::adjacent_find(u_.begin(), u_.end()) != u_.end()) {
      throw std::invalid_argument("SubsetIndex: duplicate index in u");
    }
    if (u_.front() < 1 || u_.back() > k_) {
      throw std::invalid_argument("SubsetIndex: indices must lie in 1..k");
    }
  }

  static SubsetIndex full(int k) {
    std::vector<int> all(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      all[static_cast<std::size_t>(j)] = j + 1;
    }
    return SubsetIndex(std::move(all), k);
  }

  int k() const { return k_; }
  std::size_t size() const { return u_.size(); }
  bool is_full() const { return size() == static_cast<std::size_t>(k_); }
  const std::vector<int>& indices() const { return u_; }

  std::vector<int> complement() const {
    std::vector<int> bar;
    bar.reserve(static_cast<std::size_t>(k_) - u_.size());
    std::size_t pos = 0;
    for (int j = 1; j <= k_; ++j) {
      if (pos < u_.size() && u_[pos] == j) {
        ++pos;
      } else {
        bar.push_back(j);
      }
    }
    return bar;
  }

  bool contains(int j) const { return std::binary_search(u_.begin(), u_.end(), j); }

  /// Zero-based axis lists, for Box::select and row slicing.
  std::vector<std::size_t> axes() const { return to_axes(u_); }
  std::vector<std::size_t> complement_axes() const { return to_axes(complement()); }

  Point extract(const Point& x) const { return gather(x, u_); }
  Point extract_complement(const Point& x) const { return gather(x, complement()); }

  /// Rebuild a full point from its u-part and complement part.
  Point assemble(const Point& xu, const Point& xbar) const {
    if (xu.size() != u_.size() || xbar.size() != static_cast<std::size_t>(k_) - u_.size()) {
      throw std::invalid_argument("SubsetIndex::assemble: size mismatch");
    }
    Point x(static_cast<std::size_t>(k_));
    std::size_t iu = 0, ib = 0;
    for (int j = 1; j <= k_; ++j) {
      if (iu < u_.size() && u_[iu] == j) {
        x[static_cast<std::size_t>(j - 1)] = xu[iu++];
      } else {
        x[static_cast<std::size_t>(j - 1)] = xbar[ib++];
      }
    }
    return x;
  }

 private:
  static std::vector<std::size_t> to_axes(const std::vector<int>& idx) {
    std::vector<std::size_t> axes;
    axes.reserve(idx.size());
    for (int j : idx) {
      axes.push_back(static_cast<std::size_t>(j - 1));
    }
    return axes;
  }

  Point gather(const Point& x, const std::vector<int>& idx) const {
    if (x.size() != static_cast<std::size_t>(k_)) {
      throw std::invalid_argument("SubsetIndex: point dimension does not match k");
    }
    Point out;
    out.reserve(idx.size());
    for (int j : idx) {
      out.push_back(x[static_cast<std::size_t>(j - 1)]);
    }
    return out;
  }

  std::vector<int> u_;
  int k_;
};

}  // namespace sobis

#endif  // SOBIS_SUBSET_HPP
