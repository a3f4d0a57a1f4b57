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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sobis/density.hpp"
#include "sobis/quadrature.hpp"

using namespace sobis;

TEST_CASE("Beta pdf normalizes and hits known values") {
  for (auto [a, b] : {std::pair{2.0, 2.0}, {2.0, 1.0}, {3.0, 2.0}}) {
    const Density d = beta_density(BetaParams(a, b), 0.0, 1.0);
    const auto rule = tensor_gauss_legendre(Box({0.0}, {1.0}), 64);
    REQUIRE_THAT(integrate(d.pdf, rule), Catch::Matchers::WithinAbs(1.0, 1e-8));
  }
  {
    // Shapes below 1 have endpoint singularities, so fixed-order
    // quadrature converges slowly; only closeness is checked.
    const Density d = beta_density(BetaParams(0.7, 0.7), 0.0, 1.0);
    const auto rule = tensor_gauss_legendre(Box({0.0}, {1.0}), 64);
    REQUIRE_THAT(integrate(d.pdf, rule), Catch::Matchers::WithinAbs(1.0, 5e-3));
  }
  // Beta(2,2): 6 t (1-t).
  const Density d = beta_density(BetaParams(2.0, 2.0), 0.0, 1.0);
  REQUIRE_THAT(d.pdf({0.25}), Catch::Matchers::WithinRel(6.0 * 0.25 * 0.75, 1e-12));
}

TEST_CASE("uniform Beta(1,1) pdf is exactly one everywhere") {
  for (double t : {0.0, 1e-300, 0.123, 0.5, 1.0}) {
    REQUIRE(beta_pdf_unit(1.0, 1.0, t) == 1.0);
  }
}

TEST_CASE("Beta sampler moments match the distribution") {
  Rng rng(42);
  const Density d = beta_density(BetaParams(2.0, 3.0), 0.0, 1.0);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = d.draw(rng)[0];
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  REQUIRE_THAT(mean, Catch::Matchers::WithinAbs(0.4, 0.003));        // a/(a+b)
  REQUIRE_THAT(var, Catch::Matchers::WithinAbs(0.04, 0.002));        // ab/((a+b)^2(a+b+1))
}

TEST_CASE("product density factorizes pdf and marginalizes") {
  const Density q = product_density({beta_density(BetaParams(2.0, 2.0), 0.0, 1.0),
                                     uniform_density(Box::unit_cube(1)),
                                     beta_density(BetaParams(0.8, 1.2), 0.0, 1.0)});
  const Point x{0.3, 0.9, 0.6};
  const double expected = beta_pdf_unit(2.0, 2.0, 0.3) * 1.0 * beta_pdf_unit(0.8, 1.2, 0.6);
  REQUIRE_THAT(q.pdf(x), Catch::Matchers::WithinRel(expected, 1e-12));
  const Density m = q.marginal(SubsetIndex({1, 3}, 3));
  REQUIRE_THAT(m.pdf({0.3, 0.6}), Catch::Matchers::WithinRel(expected, 1e-12));
}

TEST_CASE("marginal of a non-product density is rejected") {
  Density d = uniform_density(Box::unit_cube(2));
  d.factors = nullptr;  // simulate an unstructured density
  REQUIRE_THROWS_AS(d.marginal(SubsetIndex({1}, 2)), std::invalid_argument);
}

TEST_CASE("weight returns p/q, 0 on p=0, and errors on support violation") {
  const Density p = uniform_density(Box::unit_cube(1));
  const Density q = beta_density(BetaParams(2.0, 2.0), 0.0, 1.0);
  REQUIRE_THAT(weight(p, q, {0.5}), Catch::Matchers::WithinRel(1.0 / 1.5, 1e-12));
  REQUIRE(weight(p, q, {1.5}) == 0.0);
  // q supported on the left half only; p positive on the right half.
  const Density half{Box({0.0}, {1.0}),
                     [](const Point& x) { return x[0] < 0.5 ? 2.0 : 0.0; },
                     [](Rng& rng) {
                       std::uniform_real_distribution<double> u(0.0, 0.5);
                       return Point{u(rng)};
                     },
                     "half",
                     nullptr};
  REQUIRE_THROWS_AS(weight(p, half, {0.75}), SupportViolation);
}

TEST_CASE("interpolated density is the pointwise convex combination") {
  const Density p = uniform_density(Box::unit_cube(1));
  const Density q = beta_density(BetaParams(2.0, 2.0), 0.0, 1.0);
  const Density mix = interpolate_density(p, q, 0.3);
  REQUIRE_THAT(mix.pdf({0.4}), Catch::Matchers::WithinRel(0.7 + 0.3 * q.pdf({0.4}), 1e-12));
  REQUIRE_THROWS_AS(interpolate_density(p, q, 1.5), std::invalid_argument);
}

TEST_CASE("normalize_density recovers the constant and samples correctly") {
  auto unnorm = [](const Point& x) { return 3.0 * x[0] * x[0]; };  // integral 1 on [0,1]
  const auto nd = normalize_density(unnorm, Box({0.0}, {1.0}), 32);
  REQUIRE_THAT(nd.normalizing_constant, Catch::Matchers::WithinRel(1.0, 1e-12));
  Rng rng(7);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    s += nd.density.draw(rng)[0];
  }
  REQUIRE_THAT(s / n, Catch::Matchers::WithinAbs(0.75, 0.005));  // E[X] for pdf 3x^2
}

TEST_CASE("normalize_density rejects negative and degenerate inputs") {
  REQUIRE_THROWS(normalize_density([](const Point& x) { return x[0] - 0.5; }, Box({0.0}, {1.0}), 16));
  REQUIRE_THROWS(normalize_density([](const Point&) { return 0.0; }, Box({0.0}, {1.0}), 16));
}

TEST_CASE("2D rejection sampling reproduces marginal means") {
  auto unnorm = [](const Point& x) { return x[0] + x[1]; };
  const auto nd = normalize_density(unnorm, Box::unit_cube(2), 16);
  Rng rng(11);
  double s0 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    s0 += nd.density.draw(rng)[0];
  }
  // E[X1] for pdf (x1+x2): 7/12.
  REQUIRE_THAT(s0 / n, Catch::Matchers::WithinAbs(7.0 / 12.0, 0.01));
}

TEST_CASE("factorized weight splits into marginal and conditional parts") {
  const Density p = uniform_density(Box::unit_cube(3));
  const Density q_u = beta_density(BetaParams(2.0, 2.0), 0.0, 1.0);
  const SubsetIndex u({1}, 3);
  const Point x{0.3, 0.8, 0.2};
  const auto fw = factorized_weight(p, q_u, nullptr, u, x);
  REQUIRE_THAT(fw.w_u, Catch::Matchers::WithinRel(1.0 / beta_pdf_unit(2.0, 2.0, 0.3), 1e-12));
  REQUIRE(fw.w_bar_u == 1.0);
  REQUIRE_THAT(fw.w_total, Catch::Matchers::WithinRel(fw.w_u, 1e-12));
}
