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

#ifndef SOBIS_VARIANCE_OPT_HPP
#define SOBIS_VARIANCE_OPT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sobis/density.hpp"
#include "sobis/models.hpp"
#include "sobis/quadrature.hpp"
#include "sobis/subset.hpp"

namespace sobis {

/// Asymptotic-variance evaluation. A small negative sigma_sq from quadrature
/// rounding is clamped to zero and flagged.
struct VarianceReport {
  double sigma_sq = 0.0;
  double eta = 0.0;
  double cv = 0.0;
  std::string method;
  std::optional<double> stderr_;
  bool clamped = false;
};

inline VarianceReport make_variance_report(double sigma_sq_raw, double eta, std::string method,
                                           std::optional<double> stderr_ = std::nullopt) {
  VarianceReport r;
  r.clamped = sigma_sq_raw < 0.0;
  r.sigma_sq = std::max(0.0, sigma_sq_raw);
  r.eta = eta;
  r.cv = std::sqrt(r.sigma_sq) / eta;
  r.method = std::move(method);
  r.stderr_ = stderr_;
  return r;
}

/// Conditional expectation E_p[h(X) | X_u = x_u] by tensor quadrature over
/// the complement coordinates, with each axis split at its midpoint. The
/// reference p must factorize.
class ConditionalExpectation {
 public:
  ConditionalExpectation(const Density& p, const SubsetIndex& u, int order) : u_(u), full_(u.is_full()) {
    if (!full_) {
      if (!p.is_product()) {
        throw std::invalid_argument("ConditionalExpectation: p must be a product density");
      }
      p_bar_ = p.marginal(SubsetIndex(u.complement(), u.k()));
      rule_ = tensor_gauss_legendre_split(p_bar_->box, order);
    }
  }

  double operator()(const std::function<double(const Point&)>& h, const Point& xu) const {
    if (full_) {
      return h(xu);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < rule_.size(); ++i) {
      acc += rule_.weights[i] * p_bar_->pdf(rule_.nodes[i]) * h(u_.assemble(xu, rule_.nodes[i]));
    }
    return acc;
  }

  /// Same, with an extra conditional weight factor w(x_bar | x_u).
  double weighted(const std::function<double(const Point&)>& h, const ConditionalDensity* q_cond,
                  const Point& xu) const {
    if (full_ || !q_cond) {
      return (*this)(h, xu);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < rule_.size(); ++i) {
      const Point& xbar = rule_.nodes[i];
      const double pb = p_bar_->pdf(xbar);
      if (pb == 0.0) {
        continue;
      }
      const double qb = q_cond->pdf(xbar, xu);
      if (!(qb > 0.0)) {
        throw SupportViolation("ConditionalExpectation: conditional support violated");
      }
      acc += rule_.weights[i] * pb * (pb / qb) * h(u_.assemble(xu, xbar));
    }
    return acc;
  }

 private:
  SubsetIndex u_;
  bool full_;
  std::optional<Density> p_bar_;
  QuadratureRule rule_;
};

/// Efficiency bound under the reference distribution:
/// 4 E[m^2 E[phi^2 | X_u]] - 3 E[m^4] - eta^2.
inline VarianceReport sigma_opt_p(const ConditionalMoments& moments, const Density& p, const SubsetIndex& u,
                                  int order) {
  const Density p_u = p.marginal(u);
  const auto rule = tensor_gauss_legendre_split(p_u.box, order);
  const ConditionalExpectation inner(p, u, order);
  double eta = 0.0, t1 = 0.0, t2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& xu = rule.nodes[i];
    const double pw = rule.weights[i] * p_u.pdf(xu);
    const double m = moments.m(xu);
    const double m2 = m * m;
    eta += pw * m2;
    t1 += pw * m2 * inner(moments.phi_sq, xu);
    t2 += pw * m2 * m2;
  }
  return make_variance_report(4.0 * t1 - 3.0 * t2 - eta * eta, eta, "quadrature");
}

/// Optimal asymptotic variance under q = q_u * q_cond, evaluated in the
/// p-form by nested quadrature:
/// 4 E_p[w_u m^2 E_p[w_bar phi^2 | X_u]] - 3 E_p[w_u m^4] - eta^2.
/// q_cond = nullptr means the reference conditional.
inline VarianceReport sigma_opt_q(const ConditionalMoments& moments, const Density& p, const Density& q_u,
                                  const ConditionalDensity* q_cond, const SubsetIndex& u, int order) {
  const Density p_u = p.marginal(u);
  const auto rule = tensor_gauss_legendre_split(p_u.box, order);
  const ConditionalExpectation inner(p, u, order);
  double eta = 0.0, t1 = 0.0, t2 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& xu = rule.nodes[i];
    const double pu = p_u.pdf(xu);
    if (pu == 0.0) {
      continue;
    }
    const double wu = weight(p_u, q_u, xu);
    const double m = moments.m(xu);
    const double m2 = m * m;
    const double pw = rule.weights[i] * pu;
    eta += pw * m2;
    t1 += pw * wu * m2 * inner.weighted(moments.phi_sq, q_cond, xu);
    t2 += pw * wu * m2 * m2;
  }
  return make_variance_report(4.0 * t1 - 3.0 * t2 - eta * eta, eta, "quadrature");
}

/// The same variance in the q-form: Monte Carlo under q of the Z_u
/// conditional-moment expression, using the analytic moments pointwise.
/// Cross-validates the p-form route. eta must be supplied (exact or from
/// quadrature); its uncertainty is not propagated.
inline VarianceReport sigma_opt_q_mc(const ConditionalMoments& moments, const Density& p, const Density& q_u,
                                     const ConditionalDensity* q_cond, const SubsetIndex& u, double eta,
                                     std::size_t n, Rng& rng) {
  const Density p_u = p.marginal(u);
  std::optional<Density> p_bar;
  if (!u.is_full()) {
    p_bar = p.marginal(SubsetIndex(u.complement(), u.k()));
  }
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point xu = q_u.draw(rng);
    const double wu = weight(p_u, q_u, xu);
    double wbar = 1.0;
    Point x = xu;
    if (p_bar) {
      Point xbar;
      if (q_cond) {
        xbar = q_cond->draw(rng, xu);
        const double pb = p_bar->pdf(xbar);
        const double qb = q_cond->pdf(xbar, xu);
        if (!(qb > 0.0)) {
          throw SupportViolation("sigma_opt_q_mc: conditional support violated");
        }
        wbar = pb / qb;
      } else {
        xbar = p_bar->draw(rng);
      }
      x = u.assemble(xu, xbar);
    }
    const double m = moments.m(xu);
    const double m2 = m * m;
    // Per-sample unbiased term for 4 E_q[A^2 B] - 3 E_q[A^4], with
    // A^2 = w_u m^2 and Z^2 replaced by its conditional mean phi^2.
    const double v = 4.0 * wu * wu * m2 * wbar * wbar * moments.phi_sq(x) - 3.0 * wu * wu * m2 * m2;
    sum += v;
    sum_sq += v * v;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
  return make_variance_report(mean - eta * eta, eta, "mc", std::sqrt(var / nn));
}

/// The marginal-optimization integrand S(x_u). Case A keeps the reference
/// conditional, Case B substitutes the optimal one.
struct SFunction {
  enum class Case { A, B, Custom };
  Case which = Case::Custom;
  std::function<double(const Point& xu)> eval;
  std::shared_ptr<bool> negative_seen = std::make_shared<bool>(false);

  double operator()(const Point& xu) const {
    const double v = eval(xu);
    if (v < 0.0) {
      *negative_seen = true;
    }
    return v;
  }
};

inline SFunction s_function(const ConditionalMoments& moments, const Density& p, const SubsetIndex& u,
                            SFunction::Case which, int order) {
  auto inner = std::make_shared<ConditionalExpectation>(p, u, order);
  SFunction s;
  s.which = which;
  if (which == SFunction::Case::A) {
    s.eval = [moments, inner, u](const Point& xu) {
      const double m = moments.m(xu);
      const double m2 = m * m;
      return 4.0 * m2 * (*inner)(moments.phi_sq, xu) - 3.0 * m2 * m2;
    };
  } else if (which == SFunction::Case::B) {
    s.eval = [moments, inner, u](const Point& xu) {
      const double m = moments.m(xu);
      const double m2 = m * m;
      const double mean_phi = (*inner)([&moments](const Point& x) { return std::sqrt(moments.phi_sq(x)); }, xu);
      return 4.0 * m2 * mean_phi * mean_phi - 3.0 * m2 * m2;
    };
  } else {
    throw std::invalid_argument("s_function: pass Case::A or Case::B");
  }
  return s;
}

/// Optimal conditional density q*(x_bar | x_u) = p_bar(x_bar) phi(x) / N(x_u)
/// with N(x_u) = E_p[phi | X_u = x_u]. Normalizers are cached per x_u.
inline ConditionalDensity optimal_conditional(const ConditionalMoments& moments, const Density& p,
                                              const SubsetIndex& u, int order) {
  if (u.is_full()) {
    throw std::invalid_argument("optimal_conditional: u is the full index set (empty complement)");
  }
  const Density p_bar = p.marginal(SubsetIndex(u.complement(), u.k()));
  auto inner = std::make_shared<ConditionalExpectation>(p, u, order);
  auto cache = std::make_shared<std::map<Point, double>>();
  auto phi = [moments](const Point& x) { return std::sqrt(moments.phi_sq(x)); };
  auto normalizer = [inner, cache, phi](const Point& xu) {
    auto it = cache->find(xu);
    if (it != cache->end()) {
      return it->second;
    }
    const double nv = (*inner)(phi, xu);
    if (!(nv > 0.0)) {
      throw std::runtime_error("optimal_conditional: zero normalizer E_p[phi | x_u]");
    }
    (*cache)[xu] = nv;
    return nv;
  };
  auto pdf = [p_bar, u, phi, normalizer](const Point& xbar, const Point& xu) {
    return p_bar.pdf(xbar) * phi(u.assemble(xu, xbar)) / normalizer(xu);
  };
  const Box box_bar = p_bar.box;
  auto draw = [pdf, box_bar](Rng& rng, const Point& xu) {
    auto slice = [&](const Point& xbar) { return pdf(xbar, xu); };
    if (box_bar.dim() == 1) {
      return detail::grid_inverse_cdf_sampler(slice, box_bar, 1024)(rng);
    }
    const auto probe = tensor_gauss_legendre(box_bar, 16);
    double grid_max = 0.0;
    for (const auto& node : probe.nodes) {
      grid_max = std::max(grid_max, slice(node));
    }
    return detail::rejection_sampler(slice, box_bar, grid_max)(rng);
  };
  return ConditionalDensity{box_bar, std::move(pdf), std::move(draw), "optimal-conditional"};
}

/// Optimal marginal q_u*(x_u) = p_u sqrt(S) / E_p[sqrt(S)] and the minimized
/// variance (E_p[sqrt(S)])^2 - eta^2.
inline std::pair<Density, VarianceReport> optimal_marginal(const Density& p_u, const SFunction& s, double eta,
                                                           int order) {
  std::vector<std::vector<double>> splits(p_u.box.dim());
  for (std::size_t j = 0; j < p_u.box.dim(); ++j) {
    splits[j] = {0.5 * (p_u.box.lower[j] + p_u.box.upper[j])};
  }
  auto unnorm = [p_u, s](const Point& xu) {
    const double sv = s.eval(xu);
    if (sv < -1e-9) {
      throw std::runtime_error("optimal_marginal: negative S on quadrature grid");
    }
    return p_u.pdf(xu) * std::sqrt(std::max(0.0, sv));
  };
  auto nd = normalize_density(unnorm, p_u.box, order, splits);
  const double mean_sqrt_s = nd.normalizing_constant;  // E_p[sqrt(S)]
  auto report = make_variance_report(mean_sqrt_s * mean_sqrt_s - eta * eta, eta, "quadrature");
  nd.density.label = "optimal-marginal";
  return {std::move(nd.density), report};
}

/// Zero-variance joint density for a fully deterministic model:
/// q*(x) = p(x) f(x) m_u(x_u) / eta. Factorizes as
/// q_u* = p_u m^2 / eta and q_bar* = p_bar f / m.
inline Density zero_variance_density(const Model& model, const ConditionalMoments& moments, const Density& p,
                                     const SubsetIndex& u, double eta, int order = 64) {
  if (model.dim_w != 0) {
    throw std::invalid_argument("zero_variance_density: model must be fully deterministic (dim_w = 0)");
  }
  if (!p.is_product()) {
    throw std::invalid_argument("zero_variance_density: p must be a product density");
  }
  const Density p_u = p.marginal(u);
  std::optional<Density> p_bar;
  if (!u.is_full()) {
    p_bar = p.marginal(SubsetIndex(u.complement(), u.k()));
  }
  // Coarse positivity check of f on an 11-per-axis grid.
  {
    const auto probe = tensor_gauss_legendre(p.box, 11);
    for (const auto& node : probe.nodes) {
      if (!(model.eval(node, {}) > 0.0)) {
        throw std::runtime_error("zero_variance_density: f <= 0 on the probe grid");
      }
    }
  }
  auto p_pdf = p.pdf;
  auto m = moments.m;
  auto eval = model.eval;
  auto joint_pdf = [p_pdf, eval, m, u, eta](const Point& x) {
    return p_pdf(x) * eval(x, {}) * m(u.extract(x)) / eta;
  };
  // Marginal sampler for q_u* = p_u m^2 / eta.
  std::vector<std::vector<double>> splits(p_u.box.dim());
  for (std::size_t j = 0; j < p_u.box.dim(); ++j) {
    splits[j] = {0.5 * (p_u.box.lower[j] + p_u.box.upper[j])};
  }
  auto marg = normalize_density([p_u, m](const Point& xu) {
    const double mv = m(xu);
    return p_u.pdf(xu) * mv * mv;
  }, p_u.box, order, splits);
  auto marg_draw = marg.density.draw;
  std::function<Point(Rng&)> draw;
  if (!p_bar) {
    draw = marg_draw;
  } else {
    const Density pb = *p_bar;
    draw = [marg_draw, pb, eval, m, u](Rng& rng) {
      const Point xu = marg_draw(rng);
      const double m_xu = m(xu);
      auto cond = [&](const Point& xbar) { return pb.pdf(xbar) * eval(u.assemble(xu, xbar), {}) / m_xu; };
      Point xbar;
      if (pb.box.dim() == 1) {
        xbar = detail::grid_inverse_cdf_sampler(cond, pb.box, 1024)(rng);
      } else {
        const auto probe = tensor_gauss_legendre(pb.box, 16);
        double grid_max = 0.0;
        for (const auto& node : probe.nodes) {
          grid_max = std::max(grid_max, cond(node));
        }
        xbar = detail::rejection_sampler(cond, pb.box, grid_max)(rng);
      }
      return u.assemble(xu, xbar);
    };
  }
  return Density{p.box, std::move(joint_pdf), std::move(draw), "zero-variance", nullptr};
}

/// One point of the coefficient-of-variation curve along the interpolated
/// family q_t = (1 - t) p + t q*.
struct CvPoint {
  double t = 0.0;
  double sigma_sq_quad = 0.0;
  double cv_quad = 0.0;
  double sigma_sq_mc = 0.0;
  double sigma_sq_mc_stderr = 0.0;
  double cv_mc = 0.0;
};

/// CV_opt(t) = sigma_opt(q_t) / eta with sigma^2(q_t) = E_p[S / q_t] - eta^2,
/// evaluated both by split quadrature and by Monte Carlo under p.
inline std::vector<CvPoint> cv_curve(const Density& p, const Density& q_star, const SFunction& s, double eta,
                                     const std::vector<double>& t_grid, std::size_t n_mc, int order, Rng& rng) {
  std::vector<std::vector<double>> splits(p.box.dim());
  for (std::size_t j = 0; j < p.box.dim(); ++j) {
    splits[j] = {0.5 * (p.box.lower[j] + p.box.upper[j])};
  }
  const auto rule = tensor_gauss_legendre(p.box, order, splits);
  // Draw the MC sample once; reuse it across t for a smoother curve.
  std::vector<Point> xs;
  std::vector<double> s_vals;
  xs.reserve(n_mc);
  s_vals.reserve(n_mc);
  for (std::size_t i = 0; i < n_mc; ++i) {
    xs.push_back(p.draw(rng));
    s_vals.push_back(s.eval(xs.back()));
  }
  std::vector<CvPoint> curve;
  curve.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t < 0.0 || t > 1.0) {
      throw std::invalid_argument("cv_curve: t outside [0, 1]");
    }
    const Density q_t = interpolate_density(p, q_star, t);
    auto ratio = [&](const Point& x, double s_val) {
      const double qt = q_t.pdf(x);
      if (!(qt > 0.0)) {
        if (s_val * p.pdf(x) != 0.0) {
          throw SupportViolation("cv_curve: q_t vanishes where S p does not");
        }
        return 0.0;
      }
      return s_val / qt;
    };
    double quad = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      quad += rule.weights[i] * p.pdf(rule.nodes[i]) * ratio(rule.nodes[i], s.eval(rule.nodes[i]));
    }
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
      const double v = ratio(xs[i], s_vals[i]);
      sum += v;
      sum_sq += v * v;
    }
    const double nn = static_cast<double>(n_mc);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
    CvPoint pt;
    pt.t = t;
    pt.sigma_sq_quad = quad - eta * eta;
    pt.cv_quad = std::sqrt(std::max(0.0, pt.sigma_sq_quad)) / eta;
    pt.sigma_sq_mc = mean - eta * eta;
    pt.sigma_sq_mc_stderr = std::sqrt(var / nn);
    pt.cv_mc = std::sqrt(std::max(0.0, pt.sigma_sq_mc)) / eta;
    curve.push_back(pt);
  }
  return curve;
}

/// Variance surface over the symmetric Beta family q_u = prod Beta(alpha,
/// beta), with the reference conditional kept.
struct BetaSurface {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<std::vector<double>> sigma_sq;  // [alpha index][beta index]
  std::size_t argmin_a = 0;
  std::size_t argmin_b = 0;
  double sigma_min = 0.0;
  double sigma_ref = 0.0;  // at the uniform (1, 1)
  double reduction = 0.0;  // 1 - min / ref
  double eta = 0.0;
};

inline BetaSurface beta_variance_surface(const ConditionalMoments& moments, const Density& p, const SubsetIndex& u,
                                         const std::vector<double>& alpha_grid, const std::vector<double>& beta_grid,
                                         int order) {
  if (alpha_grid.empty() || beta_grid.empty()) {
    throw std::invalid_argument("beta_variance_surface: grids must be nonempty");
  }
  const Density p_u = p.marginal(u);
  for (std::size_t j = 0; j < p_u.box.dim(); ++j) {
    if (p_u.box.lower[j] != 0.0 || p_u.box.upper[j] != 1.0) {
      throw std::invalid_argument("beta_variance_surface: the u-marginal support must be the unit cube");
    }
  }
  const auto rule = tensor_gauss_legendre_split(p_u.box, order);
  const ConditionalExpectation inner(p, u, order);
  // Cell-independent pieces: eta and p_u^2 (4 m^2 E[phi^2|x_u] - 3 m^4).
  std::vector<double> base(rule.size());
  double eta = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Point& xu = rule.nodes[i];
    const double pu = p_u.pdf(xu);
    const double m = moments.m(xu);
    const double m2 = m * m;
    eta += rule.weights[i] * pu * m2;
    base[i] = rule.weights[i] * pu * pu * (4.0 * m2 * inner(moments.phi_sq, xu) - 3.0 * m2 * m2);
  }
  BetaSurface surface;
  surface.alphas = alpha_grid;
  surface.betas = beta_grid;
  surface.eta = eta;
  surface.sigma_sq.assign(alpha_grid.size(), std::vector<double>(beta_grid.size(), 0.0));
  double best = std::numeric_limits<double>::infinity();
  const std::size_t d = p_u.box.dim();
  for (std::size_t ia = 0; ia < alpha_grid.size(); ++ia) {
    for (std::size_t ib = 0; ib < beta_grid.size(); ++ib) {
      const double alpha = alpha_grid[ia], beta = beta_grid[ib];
      double acc = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        double q = 1.0;
        for (std::size_t j = 0; j < d; ++j) {
          q *= beta_pdf_unit(alpha, beta, rule.nodes[i][j]);
        }
        acc += base[i] / q;
      }
      const double sigma = acc - eta * eta;
      surface.sigma_sq[ia][ib] = sigma;
      if (sigma < best) {
        best = sigma;
        surface.argmin_a = ia;
        surface.argmin_b = ib;
      }
    }
  }
  surface.sigma_min = best;
  double ref = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    ref += base[i] / p_u.pdf(rule.nodes[i]);
  }
  surface.sigma_ref = ref - eta * eta;
  surface.reduction = 1.0 - surface.sigma_min / surface.sigma_ref;
  return surface;
}

}  // namespace sobis

#endif  // SOBIS_VARIANCE_OPT_HPP
