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

#ifndef SOBIS_ESTIMATORS_HPP
#define SOBIS_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobis/dataset.hpp"
#include "sobis/density.hpp"
#include "sobis/models.hpp"
#include "sobis/subset.hpp"

namespace sobis {

/// A point estimate with approximate standard error. The stderr of the rank
/// estimators treats consecutive products as i.i.d., which they are not
/// (adjacent products overlap), so it is labelled approximate.
struct EstimateReport {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
  std::string estimator;
  std::optional<double> weights_ess;
  std::string note;
};

/// ESS = (sum w)^2 / sum w^2, the usual weight-degeneracy diagnostic.
inline double effective_sample_size(std::span<const double> w) {
  double s = 0.0, s2 = 0.0;
  for (double wi : w) {
    s += wi;
    s2 += wi * wi;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

/// Reweighted outputs Z = sqrt(w_u(x_u)) * w_bar(x_bar | x_u) * y, one per
/// row of a dataset sampled under q = q_u * q_cond. The square root applies
/// to the marginal weight only; this is the single code path that builds Z.
inline std::vector<double> reweighted_outputs(const Dataset& data, const SubsetIndex& u, const Density& p,
                                              const Density& q_u, const ConditionalDensity* q_cond) {
  if (u.k() != static_cast<int>(data.k)) {
    throw std::invalid_argument("reweighted_outputs: subset ambient dimension mismatch");
  }
  const Density p_u = p.marginal(u);
  std::optional<Density> p_bar;
  if (!u.is_full()) {
    p_bar = p.marginal(SubsetIndex(u.complement(), u.k()));
  }
  std::vector<double> z(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    const Point x = data.row(i);
    const Point xu = u.extract(x);
    const double wu = weight(p_u, q_u, xu);
    double wbar = 1.0;
    if (p_bar) {
      const Point xbar = u.extract_complement(x);
      const double pb = p_bar->pdf(xbar);
      if (pb == 0.0) {
        wbar = 0.0;
      } else {
        const double qb = q_cond ? q_cond->pdf(xbar, xu) : pb;
        if (!(qb > 0.0)) {
          throw SupportViolation("reweighted_outputs: conditional support violated at row " + std::to_string(i));
        }
        wbar = pb / qb;
      }
    }
    z[i] = std::sqrt(wu) * wbar * data.y[i];
  }
  return z;
}

namespace detail {

/// Stable ordering of rows by a scalar key, ties broken by row index.
inline std::vector<std::size_t> sort_order(std::span<const double> key) {
  std::vector<std::size_t> order(key.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return order;
}

inline EstimateReport consecutive_products(std::span<const double> z, const std::vector<std::size_t>& order,
                                           const std::string& tag) {
  const std::size_t n = order.size();
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double prod = z[order[i]] * z[order[i + 1]];
    sum += prod;
    sum_sq += prod * prod;
  }
  const double count = static_cast<double>(n - 1);
  const double mean = sum / count;
  double se = 0.0;
  if (n > 2) {
    const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
    se = std::sqrt(var / count);
  }
  return EstimateReport{mean, se, n, tag, std::nullopt, "stderr is approximate (overlapping products)"};
}

}  // namespace detail

/// Rank-based estimator of eta for a scalar ordering variable: sort rows by
/// xu (stable) and average consecutive products of z.
inline EstimateReport rank_eta(std::span<const double> z, std::span<const double> xu) {
  if (z.size() != xu.size()) {
    throw std::invalid_argument("rank_eta: z and xu must have equal length");
  }
  if (z.size() < 2) {
    throw std::invalid_argument("rank_eta: need at least 2 rows");
  }
  return detail::consecutive_products(z, detail::sort_order(xu), "rank");
}

namespace detail {

/// Greedy nearest-neighbor path over standardized points, bucketed on a
/// regular grid so each step is a local ring search rather than a full scan.
inline std::vector<std::size_t> greedy_nn_path(const std::vector<Point>& pts) {
  const std::size_t n = pts.size();
  const std::size_t d = pts[0].size();
  // Standardize coordinates to [0, 1] per axis.
  std::vector<Point> s(n, Point(d));
  for (std::size_t j = 0; j < d; ++j) {
    double lo = pts[0][j], hi = pts[0][j];
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, pts[i][j]);
      hi = std::max(hi, pts[i][j]);
    }
    const double width = hi > lo ? hi - lo : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i][j] = (pts[i][j] - lo) / width;
    }
  }
  const std::size_t cells_per_axis =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::pow(static_cast<double>(n), 1.0 / static_cast<double>(d))));
  const double cell_w = 1.0 / static_cast<double>(cells_per_axis);
  auto cell_of = [&](const Point& x) {
    std::vector<std::size_t> c(d);
    for (std::size_t j = 0; j < d; ++j) {
      c[j] = std::min(cells_per_axis - 1, static_cast<std::size_t>(x[j] * static_cast<double>(cells_per_axis)));
    }
    return c;
  };
  auto cell_index = [&](const std::vector<std::size_t>& c) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < d; ++j) {
      idx = idx * cells_per_axis + c[j];
    }
    return idx;
  };
  std::size_t total_cells = 1;
  for (std::size_t j = 0; j < d; ++j) {
    total_cells *= cells_per_axis;
  }
  std::vector<std::vector<std::size_t>> buckets(total_cells);
  for (std::size_t i = 0; i < n; ++i) {
    buckets[cell_index(cell_of(s[i]))].push_back(i);
  }

  // Start at the row with the smallest first coordinate, ties by row index.
  std::size_t start = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (s[i][0] < s[start][0]) {
      start = i;
    }
  }
  std::vector<bool> visited(n, false);
  std::vector<std::size_t> path;
  path.reserve(n);
  auto dist_sq = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = s[a][j] - s[b][j];
      acc += diff * diff;
    }
    return acc;
  };
  std::size_t current = start;
  visited[current] = true;
  path.push_back(current);
  std::vector<std::size_t> tmp(d);
  for (std::size_t step = 1; step < n; ++step) {
    const auto cc = cell_of(s[current]);
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    const std::size_t max_ring = cells_per_axis;  // full cover
    for (std::size_t ring = 0; ring <= max_ring; ++ring) {
      // Any point in a cell at Chebyshev ring distance >= ring is at least
      // (ring - 1) * cell_w away; stop expanding once the best found beats
      // that bound.
      if (best < n && ring >= 1) {
        const double bound = static_cast<double>(ring - 1) * cell_w;
        if (best_d <= bound * bound) {
          break;
        }
      }
      // Enumerate cells whose Chebyshev distance from cc equals ring.
      std::vector<std::vector<std::size_t>> shell;
      std::function<void(std::size_t, bool)> recurse = [&](std::size_t j, bool on_boundary) {
        if (j == d) {
          if (on_boundary || ring == 0) {
            shell.push_back(tmp);
          }
          return;
        }
        const long lo = static_cast<long>(cc[j]) - static_cast<long>(ring);
        const long hi = static_cast<long>(cc[j]) + static_cast<long>(ring);
        for (long v = lo; v <= hi; ++v) {
          if (v < 0 || v >= static_cast<long>(cells_per_axis)) {
            continue;
          }
          const bool bound = (v == lo || v == hi);
          tmp[j] = static_cast<std::size_t>(v);
          recurse(j + 1, on_boundary || bound);
        }
      };
      recurse(0, false);
      for (const auto& c : shell) {
        for (std::size_t cand : buckets[cell_index(c)]) {
          if (visited[cand]) {
            continue;
          }
          const double dd = dist_sq(cand, current);
          if (dd < best_d || (dd == best_d && cand < best)) {
            best_d = dd;
            best = cand;
          }
        }
      }
    }
    visited[best] = true;
    path.push_back(best);
    current = best;
  }
  return path;
}

}  // namespace detail

/// Rank-style estimator for |u| >= 2: order rows along a greedy
/// nearest-neighbor path through x_u and average consecutive products of z.
/// For a single coordinate this reduces to the sorted order.
inline EstimateReport nn_rank_eta(std::span<const double> z, const std::vector<Point>& xu) {
  if (z.size() != xu.size()) {
    throw std::invalid_argument("nn_rank_eta: z and xu must have equal length");
  }
  if (z.size() < 2) {
    throw std::invalid_argument("nn_rank_eta: need at least 2 rows");
  }
  if (xu[0].size() == 1) {
    std::vector<double> key(xu.size());
    for (std::size_t i = 0; i < xu.size(); ++i) {
      key[i] = xu[i][0];
    }
    auto report = detail::consecutive_products(z, detail::sort_order(key), "nn-rank");
    return report;
  }
  return detail::consecutive_products(z, detail::greedy_nn_path(xu), "nn-rank");
}

/// Brute-force double-loop estimator of eta: outer samples of x_u, inner
/// Monte Carlo mean over the complement (and the noise), squared and
/// averaged. The inner mean's square is biased upward by Var_inner/n_inner;
/// the estimated bias is reported in the note.
inline EstimateReport double_loop_eta(const Model& model, const Density& p, const SubsetIndex& u,
                                      std::size_t n_outer, std::size_t n_inner, Rng& rng) {
  if (!p.is_product()) {
    throw std::invalid_argument("double_loop_eta: p must be a product density");
  }
  if (n_outer < 2 || n_inner < 1) {
    throw std::invalid_argument("double_loop_eta: need n_outer >= 2 and n_inner >= 1");
  }
  const Density p_u = p.marginal(u);
  std::optional<Density> p_bar;
  if (!u.is_full()) {
    p_bar = p.marginal(SubsetIndex(u.complement(), u.k()));
  }
  double sum = 0.0, sum_sq = 0.0, bias_acc = 0.0;
  for (std::size_t i = 0; i < n_outer; ++i) {
    const Point xu = p_u.draw(rng);
    double inner_sum = 0.0, inner_sq = 0.0;
    for (std::size_t j = 0; j < n_inner; ++j) {
      const Point xbar = p_bar ? p_bar->draw(rng) : Point{};
      Point w;
      if (model.dim_w > 0) {
        w = model.draw_noise(rng);
      }
      const double yij = model.eval(u.assemble(xu, xbar), w);
      inner_sum += yij;
      inner_sq += yij * yij;
    }
    const double mhat = inner_sum / static_cast<double>(n_inner);
    if (n_inner > 1) {
      const double inner_var =
          std::max(0.0, (inner_sq - static_cast<double>(n_inner) * mhat * mhat) / (static_cast<double>(n_inner) - 1.0));
      bias_acc += inner_var / static_cast<double>(n_inner);
    }
    const double v = mhat * mhat;
    sum += v;
    sum_sq += v * v;
  }
  const double no = static_cast<double>(n_outer);
  const double mean = sum / no;
  const double var = std::max(0.0, (sum_sq - no * mean * mean) / (no - 1.0));
  EstimateReport report{mean, std::sqrt(var / no), n_outer, "double-loop", std::nullopt, ""};
  if (n_inner == 1) {
    report.note = "biased: n_inner=1 estimates E[Y Y'] cross term without inner averaging";
  } else {
    report.note = "inner bias estimate +" + std::to_string(bias_acc / no);
  }
  return report;
}

/// Plain importance-sampling mean of f under p using samples from q.
inline MCEstimate is_mean(const std::function<double(const Point&)>& f, const Density& p, const Density& q,
                          std::size_t n, Rng& rng) {
  return mc_integrate([&](const Point& x) { return f(x) * weight(p, q, x); }, q, n, rng);
}

/// Sobol' index from an eta estimate: (eta - mean(y)^2) / var(y).
inline double sobol_from_eta(double eta_hat, std::span<const double> y) {
  if (y.size() < 2) {
    throw std::invalid_argument("sobol_from_eta: need at least 2 outputs");
  }
  double s = 0.0;
  for (double yi : y) {
    s += yi;
  }
  const double mean = s / static_cast<double>(y.size());
  double ss = 0.0;
  for (double yi : y) {
    ss += (yi - mean) * (yi - mean);
  }
  const double var = ss / (static_cast<double>(y.size()) - 1.0);
  if (!(var > 0.0)) {
    throw std::invalid_argument("sobol_from_eta: output variance is zero");
  }
  return (eta_hat - mean * mean) / var;
}

}  // namespace sobis

#endif  // SOBIS_ESTIMATORS_HPP
