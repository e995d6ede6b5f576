// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "levyfock/basespace.hpp"

using namespace levyfock;

TEST_CASE("integrate, inner, pointwise product on the two-point grid") {
  Grid g({0.5, 0.5});
  TestFunction f({1.0, -1.0});
  REQUIRE(integrate(f, g) == 0.0);
  REQUIRE(inner(f, f, g) == 1.0);
  TestFunction f2 = pointwise_product(f, f);
  REQUIRE(f2.v == std::vector<double>{1.0, 1.0});
  REQUIRE(integrate(f2, g) == 1.0);
}

TEST_CASE("integrate of a product equals the inner product exactly") {
  Grid g({0.25, 0.5, 0.125});
  TestFunction f({1.5, -2.0, 3.0}), h({0.5, 0.25, -1.0});
  REQUIRE(integrate(pointwise_product(f, h), g) == inner(f, h, g));
}

TEST_CASE("inner is symmetric, bilinear, positive definite") {
  Grid g({0.3, 0.2, 0.5});
  TestFunction f({1.0, 2.0, -1.0}), h({0.0, 1.0, 1.0}), k({-2.0, 0.5, 0.25});
  REQUIRE(inner(f, h, g) == inner(h, f, g));
  const double a = 0.75, b = -1.25;
  REQUIRE(inner(linear_combination(a, f, b, h), k, g) ==
          Catch::Approx(a * inner(f, k, g) + b * inner(h, k, g)).margin(1e-15));
  REQUIRE(inner(f, f, g) > 0.0);
}

TEST_CASE("length mismatches raise dimension errors") {
  Grid g({0.5, 0.5});
  TestFunction f({1.0, 2.0, 3.0});
  REQUIRE_THROWS_WITH(integrate(f, g), Catch::Matchers::ContainsSubstring("dimension error"));
  REQUIRE_THROWS_AS(pointwise_product(f, TestFunction({1.0})), std::invalid_argument);
}

TEST_CASE("grids require positive weights") {
  REQUIRE_THROWS_AS(Grid({0.5, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(Grid({-1.0}), std::invalid_argument);
}
