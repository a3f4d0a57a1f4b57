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

#ifndef SOBIS_MODELS_HPP
#define SOBIS_MODELS_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobis/dataset.hpp"
#include "sobis/density.hpp"
#include "sobis/subset.hpp"

namespace sobis {

/// An evaluable model Y = f(X, W). dim_w = 0 means fully deterministic with
/// all inputs controllable.
struct Model {
  int dim_x = 0;
  int dim_w = 0;
  std::function<double(const Point& x, const Point& w)> eval;
  std::function<Point(Rng&)> draw_noise;
  std::string label;
};

/// Analytic conditional-moment carriers for a model: the conditional mean
/// m_u(x_u) = E[Y | X_u], and phi_sq(x) = E[Y^2 | X = x].
struct ConditionalMoments {
  std::function<double(const Point& xu)> m;
  std::function<double(const Point& x)> phi_sq;
  double phi(const Point& x) const { return std::sqrt(phi_sq(x)); }
};

/// The Sobol' g-function prod_i (|4 x_i - 2| + a_i) / (1 + a_i) on the unit
/// cube, with nonnegative coefficients a_i.
struct GFunctionSpec {
  std::vector<double> a;

  explicit GFunctionSpec(std::vector<double> coeffs) : a(std::move(coeffs)) {
    if (a.empty()) {
      throw std::invalid_argument("GFunctionSpec: dimension must be >= 1");
    }
    for (double ai : a) {
      if (ai < 0.0) {
        throw std::invalid_argument("GFunctionSpec: coefficients must be nonnegative");
      }
    }
  }

  int dim() const { return static_cast<int>(a.size()); }
};

/// One-dimensional g-function factor (|4t - 2| + a) / (1 + a). Unit mean
/// under U[0,1].
inline double gfunction_factor(double t, double a) { return (std::abs(4.0 * t - 2.0) + a) / (1.0 + a); }

/// Mean of the squared factor under U[0,1]: 1 + 1/(3 (1 + a)^2).
inline double gfunction_factor_sq_mean(double a) { return 1.0 + 1.0 / (3.0 * (1.0 + a) * (1.0 + a)); }

inline double gfunction_eval(const GFunctionSpec& spec, const Point& x) {
  if (x.size() != spec.a.size()) {
    throw std::invalid_argument("gfunction_eval: point dimension mismatch");
  }
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || x[i] > 1.0) {
      throw std::invalid_argument("gfunction_eval: point outside the unit cube");
    }
    v *= gfunction_factor(x[i], spec.a[i]);
  }
  return v;
}

inline Model gfunction_model(const GFunctionSpec& spec) {
  return Model{spec.dim(), 0, [spec](const Point& x, const Point&) { return gfunction_eval(spec, x); }, nullptr,
               "gfunction"};
}

/// Exact eta_u = E[m_u^2] = prod_{i in u} (1 + 1/(3 (1 + a_i)^2)).
inline double gfunction_eta(const GFunctionSpec& spec, const SubsetIndex& u) {
  if (u.k() != spec.dim()) {
    throw std::invalid_argument("gfunction_eta: subset ambient dimension mismatch");
  }
  double eta = 1.0;
  for (auto i : u.axes()) {
    eta *= gfunction_factor_sq_mean(spec.a[i]);
  }
  return eta;
}

/// Output variance under the uniform reference: prod_i E[g_i^2] - 1.
inline double gfunction_variance(const GFunctionSpec& spec) {
  double v = 1.0;
  for (double ai : spec.a) {
    v *= gfunction_factor_sq_mean(ai);
  }
  return v - 1.0;
}

/// Closed-form moments with the complement of u treated as uncontrolled
/// noise: m_u is the product of the u factors and
/// phi_sq(x) = prod_{i in u} g_i^2(x_i) * prod_{j not in u} E[g_j^2],
/// so phi_sq is constant along the complement coordinates.
inline ConditionalMoments gfunction_moments(const GFunctionSpec& spec, const SubsetIndex& u) {
  if (u.k() != spec.dim()) {
    throw std::invalid_argument("gfunction_moments: subset ambient dimension mismatch");
  }
  const auto axes = u.axes();
  std::vector<double> a_u;
  for (auto i : axes) {
    a_u.push_back(spec.a[i]);
  }
  double noise_const = 1.0;
  for (auto j : u.complement_axes()) {
    noise_const *= gfunction_factor_sq_mean(spec.a[j]);
  }
  auto m = [a_u](const Point& xu) {
    if (xu.size() != a_u.size()) {
      throw std::invalid_argument("gfunction m_u: point dimension mismatch");
    }
    double v = 1.0;
    for (std::size_t i = 0; i < a_u.size(); ++i) {
      v *= gfunction_factor(xu[i], a_u[i]);
    }
    return v;
  };
  auto phi_sq = [m, u, noise_const](const Point& x) {
    const double mu = m(u.extract(x));
    return mu * mu * noise_const;
  };
  return ConditionalMoments{std::move(m), std::move(phi_sq)};
}

/// Moments for the fully deterministic reading of the g-function: same m_u,
/// but phi_sq(x) = f(x)^2 exactly.
inline ConditionalMoments gfunction_moments_deterministic(const GFunctionSpec& spec, const SubsetIndex& u) {
  ConditionalMoments base = gfunction_moments(spec, u);
  auto phi_sq = [spec](const Point& x) {
    const double f = gfunction_eval(spec, x);
    return f * f;
  };
  return ConditionalMoments{base.m, std::move(phi_sq)};
}

/// Draw an i.i.d. input/output table from a model under the density p.
/// A fixed RNG state yields a bit-identical dataset on re-run.
inline Dataset synthetic_dataset(const Model& model, const Density& p, std::size_t n, Rng& rng) {
  if (n < 2) {
    throw std::invalid_argument("synthetic_dataset: n must be >= 2 (rank estimation needs two rows)");
  }
  if (static_cast<int>(p.box.dim()) != model.dim_x) {
    throw std::invalid_argument("synthetic_dataset: density dimension does not match model");
  }
  Dataset data;
  data.n = n;
  data.k = p.box.dim();
  data.x.reserve(n * data.k);
  data.y.reserve(n);
  data.box = p.box;
  for (std::size_t i = 0; i < n; ++i) {
    const Point xi = p.draw(rng);
    Point w;
    if (model.dim_w > 0) {
      if (!model.draw_noise) {
        throw std::invalid_argument("synthetic_dataset: model has noise dimensions but no noise sampler");
      }
      w = model.draw_noise(rng);
    }
    data.x.insert(data.x.end(), xi.begin(), xi.end());
    data.y.push_back(model.eval(xi, w));
  }
  return data;
}

}  // namespace sobis

#endif  // SOBIS_MODELS_HPP
