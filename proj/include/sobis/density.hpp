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

#ifndef SOBIS_DENSITY_HPP
#define SOBIS_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sobis/box.hpp"
#include "sobis/quadrature.hpp"
#include "sobis/subset.hpp"

namespace sobis {

/// Thrown when an importance weight p/q is requested at a point where q
/// vanishes but p does not. Unbiasedness requires supp(q) to cover supp(p);
/// this is enforced, never clipped.
class SupportViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape parameters of a Beta distribution.
struct BetaParams {
  double alpha;
  double beta;
  BetaParams(double a, double b) : alpha(a), beta(b) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
      throw std::invalid_argument("BetaParams: shape parameters must be positive");
    }
  }
};

/// Importance weight split into marginal and conditional factors.
struct FactorizedWeight {
  double w_u;
  double w_bar_u;
  double w_total;
};

// Endpoint clamp for Beta pdfs: shapes below 1 diverge at 0 and 1, so pdf
// evaluation at exact endpoints uses the point nudged inward by this amount.
inline constexpr double kEndpointEps = 1e-12;

/// Beta(alpha, beta) pdf on (0, 1), with endpoint clamping. Exactly 1 for
/// (1, 1) at any point, so baseline weights are bit-exact.
inline double beta_pdf_unit(double alpha, double beta, double t) {
  t = std::clamp(t, kEndpointEps, 1.0 - kEndpointEps);
  const double log_b = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
  return std::exp((alpha - 1.0) * std::log(t) + (beta - 1.0) * std::log1p(-t) - log_b);
}

/// A probability density on a Box with pdf evaluation and sampling.
///
/// Densities are immutable after construction and pdf evaluation is pure;
/// sharing across threads is safe as long as each thread owns its RNG.
/// `factors` is set whenever the density is a product of 1D marginals, which
/// is what every marginalization in this library relies on.
struct Density {
  Box box;
  std::function<double(const Point&)> pdf;
  std::function<Point(Rng&)> draw;
  std::string label;
  std::shared_ptr<const std::vector<Density>> factors;

  std::vector<Point> sample(Rng& rng, std::size_t n) const {
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back(draw(rng));
    }
    return out;
  }

  bool is_product() const { return box.dim() == 1 || factors != nullptr; }

  /// Product of the 1D factors selected by u. Requires a factorized density.
  Density marginal(const SubsetIndex& u) const;
};

inline Density beta_density(const BetaParams& params, double lo, double hi) {
  if (!(lo < hi)) {
    throw std::invalid_argument("beta_density: lo must be < hi");
  }
  const double alpha = params.alpha, beta = params.beta;
  const double width = hi - lo;
  Density d{Box({lo}, {hi}),
            [alpha, beta, lo, width](const Point& x) {
              if (x.size() != 1) {
                throw std::invalid_argument("beta_density: 1D point expected");
              }
              if (x[0] < lo || x[0] > lo + width) {
                return 0.0;
              }
              return beta_pdf_unit(alpha, beta, (x[0] - lo) / width) / width;
            },
            [alpha, beta, lo, width](Rng& rng) {
              std::gamma_distribution<double> ga(alpha, 1.0), gb(beta, 1.0);
              const double a = ga(rng), b = gb(rng);
              double t = (a + b > 0.0) ? a / (a + b) : 0.5;
              t = std::clamp(t, kEndpointEps, 1.0 - kEndpointEps);
              return Point{lo + width * t};
            },
            "beta(" + std::to_string(alpha) + "," + std::to_string(beta) + ")",
            nullptr};
  return d;
}

inline Density uniform_density(const Box& box) {
  const double inv_vol = 1.0 / box.volume();
  Density d{box,
            [box, inv_vol](const Point& x) { return box.contains(x) ? inv_vol : 0.0; },
            [box](Rng& rng) {
              Point x(box.dim());
              for (std::size_t j = 0; j < box.dim(); ++j) {
                std::uniform_real_distribution<double> dist(box.lower[j], box.upper[j]);
                x[j] = dist(rng);
              }
              return x;
            },
            "uniform",
            nullptr};
  if (box.dim() > 1) {
    auto factors = std::make_shared<std::vector<Density>>();
    for (std::size_t j = 0; j < box.dim(); ++j) {
      factors->push_back(uniform_density(Box({box.lower[j]}, {box.upper[j]})));
    }
    d.factors = std::move(factors);
  }
  return d;
}

inline Density product_density(std::vector<Density> marginals) {
  if (marginals.empty()) {
    throw std::invalid_argument("product_density: at least one marginal required");
  }
  std::vector<double> lo, up;
  std::string label = "product(";
  for (std::size_t j = 0; j < marginals.size(); ++j) {
    if (marginals[j].box.dim() != 1) {
      throw std::invalid_argument("product_density: all marginals must be one-dimensional");
    }
    lo.push_back(marginals[j].box.lower[0]);
    up.push_back(marginals[j].box.upper[0]);
    label += (j ? "," : "") + marginals[j].label;
  }
  label += ")";
  auto factors = std::make_shared<std::vector<Density>>(std::move(marginals));
  Box box(std::move(lo), std::move(up));
  Density d{box,
            [factors](const Point& x) {
              if (x.size() != factors->size()) {
                throw std::invalid_argument("product_density: point dimension mismatch");
              }
              double v = 1.0;
              for (std::size_t j = 0; j < factors->size(); ++j) {
                v *= (*factors)[j].pdf(Point{x[j]});
              }
              return v;
            },
            [factors](Rng& rng) {
              Point x(factors->size());
              for (std::size_t j = 0; j < factors->size(); ++j) {
                x[j] = (*factors)[j].draw(rng)[0];
              }
              return x;
            },
            std::move(label),
            factors};
  return d;
}

inline Density Density::marginal(const SubsetIndex& u) const {
  if (u.k() != static_cast<int>(box.dim())) {
    throw std::invalid_argument("Density::marginal: subset ambient dimension mismatch");
  }
  if (u.is_full()) {
    return *this;
  }
  if (!factors) {
    throw std::invalid_argument("Density::marginal: density is not a product of 1D marginals");
  }
  std::vector<Density> selected;
  for (auto j : u.axes()) {
    selected.push_back((*factors)[j]);
  }
  if (selected.size() == 1) {
    return selected[0];
  }
  return product_density(std::move(selected));
}

/// Pointwise convex combination (1-t) p + t q; samples by component selection.
inline Density interpolate_density(const Density& p, const Density& q, double t) {
  if (t < 0.0 || t > 1.0) {
    throw std::invalid_argument("interpolate_density: t must lie in [0, 1]");
  }
  if (p.box.dim() != q.box.dim()) {
    throw std::invalid_argument("interpolate_density: dimension mismatch");
  }
  for (std::size_t j = 0; j < p.box.dim(); ++j) {
    if (p.box.lower[j] != q.box.lower[j] || p.box.upper[j] != q.box.upper[j]) {
      throw std::invalid_argument("interpolate_density: densities must share the same box");
    }
  }
  auto p_pdf = p.pdf;
  auto q_pdf = q.pdf;
  auto p_draw = p.draw;
  auto q_draw = q.draw;
  Density d{p.box,
            [p_pdf, q_pdf, t](const Point& x) { return (1.0 - t) * p_pdf(x) + t * q_pdf(x); },
            [p_draw, q_draw, t](Rng& rng) {
              std::bernoulli_distribution pick(t);
              return pick(rng) ? q_draw(rng) : p_draw(rng);
            },
            "mix(t=" + std::to_string(t) + ")",
            nullptr};
  return d;
}

/// Density produced by numerical normalization, carrying its constant.
struct NormalizedDensity {
  Density density;
  double normalizing_constant;
};

namespace detail {

/// 1D sampler by inverse CDF on a trapezoid grid.
inline std::function<Point(Rng&)> grid_inverse_cdf_sampler(const std::function<double(const Point&)>& pdf,
                                                           const Box& box, std::size_t grid_n = 4096) {
  const double lo = box.lower[0], hi = box.upper[0];
  auto xs = std::make_shared<std::vector<double>>(grid_n + 1);
  auto cdf = std::make_shared<std::vector<double>>(grid_n + 1, 0.0);
  double prev = pdf(Point{lo});
  (*xs)[0] = lo;
  for (std::size_t i = 1; i <= grid_n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n);
    const double cur = pdf(Point{x});
    (*xs)[i] = x;
    (*cdf)[i] = (*cdf)[i - 1] + 0.5 * (prev + cur) * (hi - lo) / static_cast<double>(grid_n);
    prev = cur;
  }
  const double total = cdf->back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::runtime_error("grid_inverse_cdf_sampler: degenerate CDF");
  }
  return [xs, cdf, total](Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, total);
    const double target = unif(rng);
    auto it = std::lower_bound(cdf->begin(), cdf->end(), target);
    std::size_t i = static_cast<std::size_t>(std::distance(cdf->begin(), it));
    if (i == 0) {
      i = 1;
    }
    const double c0 = (*cdf)[i - 1], c1 = (*cdf)[i];
    const double frac = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.5;
    return Point{(*xs)[i - 1] + frac * ((*xs)[i] - (*xs)[i - 1])};
  };
}

/// Rejection sampler from a uniform envelope over the box. The envelope
/// constant is the grid maximum inflated by 1.5; a runtime violation is
/// reported by inflating once and retrying, a second violation throws.
inline std::function<Point(Rng&)> rejection_sampler(std::function<double(const Point&)> pdf, const Box& box,
                                                    double grid_max) {
  auto envelope = std::make_shared<double>(grid_max * 1.5);
  auto inflations = std::make_shared<int>(0);
  return [pdf = std::move(pdf), box, envelope, inflations](Rng& rng) {
    for (;;) {
      Point x(box.dim());
      for (std::size_t j = 0; j < box.dim(); ++j) {
        std::uniform_real_distribution<double> dist(box.lower[j], box.upper[j]);
        x[j] = dist(rng);
      }
      const double v = pdf(x);
      if (v > *envelope) {
        if (++(*inflations) > 1) {
          throw std::runtime_error("rejection_sampler: envelope violated twice; pdf bound unreliable");
        }
        *envelope = v * 1.5;
        continue;
      }
      std::uniform_real_distribution<double> vert(0.0, *envelope);
      if (vert(rng) <= v) {
        return x;
      }
    }
  };
}

}  // namespace detail

/// Normalize a nonnegative integrable function into a Density via tensor
/// quadrature. Sampling is grid inverse-CDF in 1D and rejection otherwise.
inline NormalizedDensity normalize_density(const std::function<double(const Point&)>& unnormalized, const Box& box,
                                           int quad_order, const std::vector<std::vector<double>>& splits = {}) {
  const auto rule = tensor_gauss_legendre(box, quad_order, splits);
  double integral = 0.0;
  double grid_max = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = unnormalized(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw std::runtime_error("normalize_density: non-finite pdf value on quadrature grid");
    }
    if (v < 0.0) {
      throw std::runtime_error("normalize_density: negative pdf value on quadrature grid");
    }
    grid_max = std::max(grid_max, v);
    integral += rule.weights[i] * v;
  }
  if (!(integral > 0.0) || !std::isfinite(integral)) {
    throw std::runtime_error("normalize_density: normalizing integral is not positive and finite");
  }
  auto pdf = [unnormalized, integral](const Point& x) { return unnormalized(x) / integral; };
  std::function<Point(Rng&)> draw;
  if (box.dim() == 1) {
    draw = detail::grid_inverse_cdf_sampler(pdf, box);
  } else {
    draw = detail::rejection_sampler(pdf, box, grid_max / integral);
  }
  return NormalizedDensity{Density{box, std::move(pdf), std::move(draw), "normalized", nullptr}, integral};
}

/// Likelihood ratio p(x)/q(x); 0 whenever p(x) = 0, error when q(x) = 0 with
/// p(x) > 0.
inline double weight(const Density& p, const Density& q, const Point& x) {
  const double px = p.pdf(x);
  if (px == 0.0) {
    return 0.0;
  }
  const double qx = q.pdf(x);
  if (!(qx > 0.0)) {
    throw SupportViolation("weight: q vanishes where p does not (support condition violated)");
  }
  return px / qx;
}

/// Conditional density of x_bar given x_u. `draw` may be empty when only pdf
/// evaluation is needed.
struct ConditionalDensity {
  Box box_bar;
  std::function<double(const Point& xbar, const Point& xu)> pdf;
  std::function<Point(Rng&, const Point& xu)> draw;
  std::string label;
};

/// Wrap a marginal density as a conditional that ignores its conditioning
/// point (the independent case).
inline ConditionalDensity conditional_from_marginal(const Density& marginal_bar) {
  auto pdf = marginal_bar.pdf;
  auto draw = marginal_bar.draw;
  return ConditionalDensity{marginal_bar.box, [pdf](const Point& xbar, const Point&) { return pdf(xbar); },
                            [draw](Rng& rng, const Point&) { return draw(rng); }, marginal_bar.label};
}

/// Factorized weight w(x) = w_u(x_u) * w_bar(x_bar | x_u) for a product
/// reference p. For the full index set the conditional factor is 1.
inline FactorizedWeight factorized_weight(const Density& p, const Density& q_u, const ConditionalDensity* q_cond,
                                          const SubsetIndex& u, const Point& x) {
  const Point xu = u.extract(x);
  const double wu = weight(p.marginal(u), q_u, xu);
  double wbar = 1.0;
  if (!u.is_full()) {
    const Point xbar = u.extract_complement(x);
    const Density p_bar = p.marginal(SubsetIndex(u.complement(), u.k()));
    const double pb = p_bar.pdf(xbar);
    if (pb != 0.0) {
      const double qb = q_cond ? q_cond->pdf(xbar, xu) : pb;
      if (!(qb > 0.0)) {
        throw SupportViolation("factorized_weight: conditional support condition violated");
      }
      wbar = pb / qb;
    } else {
      wbar = 0.0;
    }
  }
  return FactorizedWeight{wu, wbar, wu * wbar};
}

/// Sample mean of f under the given sampling density, with standard error.
inline MCEstimate mc_integrate(const std::function<double(const Point&)>& f, const Density& sampler, std::size_t n,
                               Rng& rng) {
  if (n < 2) {
    throw std::invalid_argument("mc_integrate: n must be >= 2");
  }
  double sum = 0.0, sum_sq = 0.0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = f(sampler.draw(rng));
    if (!std::isfinite(v)) {
      ++bad;
      continue;
    }
    sum += v;
    sum_sq += v * v;
  }
  if (bad > 0) {
    throw std::runtime_error("mc_integrate: " + std::to_string(bad) + " non-finite integrand values");
  }
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) / (static_cast<double>(n) - 1.0));
  return MCEstimate{mean, std::sqrt(var / static_cast<double>(n)), n};
}

}  // namespace sobis

#endif  // SOBIS_DENSITY_HPP
