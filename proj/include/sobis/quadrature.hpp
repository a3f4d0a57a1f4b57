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

#ifndef SOBIS_QUADRATURE_HPP
#define SOBIS_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sobis/box.hpp"

namespace sobis {

inline constexpr std::size_t kMaxTensorDim = 4;

/// Tensor-product quadrature rule on a Box. Weights sum to the box volume.
struct QuadratureRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Monte Carlo estimate with its naive standard error.
struct MCEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1], by Newton iteration on P_n.
inline void gauss_legendre_reference(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 2) {
    throw std::invalid_argument("gauss_legendre: order must be >= 2");
  }
  const std::size_t n = static_cast<std::size_t>(order);
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        break;
      }
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

/// Composite 1D rule on [lo, hi], optionally subdivided at interior points.
inline void composite_axis(double lo, double hi, int order, const std::vector<double>& splits,
                           std::vector<double>& nodes, std::vector<double>& weights) {
  std::vector<double> edges{lo};
  for (double s : splits) {
    if (s <= lo || s >= hi) {
      throw std::invalid_argument("quadrature: split point outside axis interval");
    }
    edges.push_back(s);
  }
  edges.push_back(hi);
  std::vector<double> ref_n, ref_w;
  gauss_legendre_reference(order, ref_n, ref_w);
  nodes.clear();
  weights.clear();
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s], b = edges[s + 1];
    for (std::size_t i = 0; i < ref_n.size(); ++i) {
      nodes.push_back(0.5 * (b - a) * ref_n[i] + 0.5 * (a + b));
      weights.push_back(0.5 * (b - a) * ref_w[i]);
    }
  }
}

}  // namespace detail

/// Tensor Gauss-Legendre rule on a box, with optional interior split points
/// per axis (pass one vector per axis; empty vector = no split).
inline QuadratureRule tensor_gauss_legendre(const Box& box, int order,
                                            const std::vector<std::vector<double>>& splits = {}) {
  const std::size_t d = box.dim();
  if (d > kMaxTensorDim) {
    throw std::invalid_argument("tensor_gauss_legendre: dimension > 4 (use mc_integrate)");
  }
  if (!splits.empty() && splits.size() != d) {
    throw std::invalid_argument("tensor_gauss_legendre: one split list per axis expected");
  }
  std::vector<std::vector<double>> axis_nodes(d), axis_weights(d);
  for (std::size_t j = 0; j < d; ++j) {
    detail::composite_axis(box.lower[j], box.upper[j], order, splits.empty() ? std::vector<double>{} : splits[j],
                           axis_nodes[j], axis_weights[j]);
  }
  QuadratureRule rule;
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) {
    total *= axis_nodes[j].size();
  }
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t count = 0; count < total; ++count) {
    Point x(d);
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = axis_nodes[j][idx[j]];
      w *= axis_weights[j][idx[j]];
    }
    rule.nodes.push_back(std::move(x));
    rule.weights.push_back(w);
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < axis_nodes[j].size()) {
        break;
      }
      idx[j] = 0;
    }
  }
  return rule;
}

/// Rule with every axis split at its midpoint. Integrands derived from the
/// g-function have a kink halfway along each axis; splitting there restores
/// spectral convergence.
inline QuadratureRule tensor_gauss_legendre_split(const Box& box, int order) {
  std::vector<std::vector<double>> splits(box.dim());
  for (std::size_t j = 0; j < box.dim(); ++j) {
    splits[j] = {0.5 * (box.lower[j] + box.upper[j])};
  }
  return tensor_gauss_legendre(box, order, splits);
}

inline double integrate(const std::function<double(const Point&)>& f, const QuadratureRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw std::runtime_error("integrate: non-finite integrand value at a quadrature node");
    }
    sum += rule.weights[i] * v;
  }
  return sum;
}

}  // namespace sobis

#endif  // SOBIS_QUADRATURE_HPP
