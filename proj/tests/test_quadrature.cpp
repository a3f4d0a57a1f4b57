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

#include "sobis/quadrature.hpp"

using namespace sobis;

TEST_CASE("1D rule integrates polynomials exactly up to degree 2n-1") {
  const auto rule = tensor_gauss_legendre(Box({0.0}, {1.0}), 8);
  for (int deg = 0; deg <= 15; ++deg) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      acc += rule.weights[i] * std::pow(rule.nodes[i][0], deg);
    }
    REQUIRE_THAT(acc, Catch::Matchers::WithinAbs(1.0 / (deg + 1), 1e-13));
  }
}

TEST_CASE("weights are positive and sum to the box volume") {
  const Box box({-1.0, 0.0, 2.0}, {3.0, 0.5, 5.0});
  const auto rule = tensor_gauss_legendre(box, 5);
  double total = 0.0;
  for (double w : rule.weights) {
    REQUIRE(w > 0.0);
    total += w;
  }
  REQUIRE_THAT(total, Catch::Matchers::WithinRel(box.volume(), 1e-12));
}

TEST_CASE("axis splits recover a kinked integrand") {
  // |4t - 2| has a kink at 0.5; split rules converge much faster there.
  auto f = [](const Point& x) { return std::abs(4.0 * x[0] - 2.0); };
  const auto split = tensor_gauss_legendre_split(Box({0.0}, {1.0}), 16);
  REQUIRE_THAT(integrate(f, split), Catch::Matchers::WithinAbs(1.0, 1e-14));
}

TEST_CASE("3D tensor rule matches a separable integral") {
  const auto rule = tensor_gauss_legendre(Box::unit_cube(3), 12);
  auto f = [](const Point& x) { return std::sin(x[0]) * x[1] * x[1] * std::exp(x[2]); };
  const double exact = (1.0 - std::cos(1.0)) * (1.0 / 3.0) * (std::exp(1.0) - 1.0);
  REQUIRE_THAT(integrate(f, rule), Catch::Matchers::WithinRel(exact, 1e-12));
}

TEST_CASE("dimension cap is enforced") {
  REQUIRE_THROWS_AS(tensor_gauss_legendre(Box::unit_cube(5), 4), std::invalid_argument);
}

TEST_CASE("non-finite integrand values are rejected") {
  const auto rule = tensor_gauss_legendre(Box({0.0}, {1.0}), 4);
  REQUIRE_THROWS(integrate([](const Point& x) { return 1.0 / (x[0] - x[0]); }, rule));
}
