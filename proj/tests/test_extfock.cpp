// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levyfock/extfock.hpp"

using namespace levyfock;

namespace {

// the standard two-point instance: w = (1/2, 1/2), phi = (1, -1), b_1 = 1
struct StandardInstance {
  Grid grid{std::vector<double>{0.5, 0.5}};
  JacobiMatrix jacobi{{0.0, 0.0}, {1.0}, true};
  TestFunction phi{std::vector<double>{1.0, -1.0}};
  TestFunction psi{std::vector<double>{1.0, 1.0}};
  ExtSpace space{grid, jacobi, 6};
};

std::uint64_t rng_state = 12345;
double next_uniform() {
  rng_state = rng_state * 6364136223846793005ull + 1442695040888963407ull;
  return 2.0 * ((rng_state >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

TEST_CASE("block dimension formula matches explicit enumeration") {
  for (int m = 1; m <= 4; ++m)
    for (int n = 0; n <= 4; ++n)
      for (const auto& a : enumerate_alphas(n)) {
        const auto basis = enumerate_block_basis(a, m);
        REQUIRE(static_cast<long>(basis.size()) == block_dimension(a, m));
      }
}

TEST_CASE("block basis order is colex per class") {
  const auto pairs = enumerate_block_basis(AlphaIndex({2}), 3);
  const std::vector<PointKey> expected = {{0, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}, {2, 2}};
  REQUIRE(pairs == expected);
  // with two classes, the lower class varies fastest
  const auto mixed = enumerate_block_basis(AlphaIndex({1, 1}), 2);
  const std::vector<PointKey> expected2 = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  REQUIRE(mixed == expected2);
}

TEST_CASE("d_alpha duplicates variables by class") {
  const int m = 3;
  SECTION("pure singletons embed identically") {
    SymTensor f(2);
    f.vals[{0, 2}] = 1.5;
    auto blk = d_alpha(f, AlphaIndex({2}), m);
    REQUIRE(blk.at({0, 2}) == 1.5);
  }
  SECTION("one pair reads the diagonal") {
    SymTensor f(2);
    f.vals[{1, 1}] = 2.0;
    f.vals[{0, 1}] = -3.0;
    auto blk = d_alpha(f, AlphaIndex({0, 1}), m);
    REQUIRE(blk.at({1}) == 2.0);   // f(x, x) at x = 1
    REQUIRE(blk.count({0}) == 0);  // f(0,0) = 0
  }
  SECTION("singleton plus pair reads f(x1, x2, x2)") {
    SymTensor f(3);
    f.vals[{0, 2, 2}] = 7.0;
    auto blk = d_alpha(f, AlphaIndex({1, 1}), m);
    // key layout: [class-1 point | class-2 point]
    REQUIRE(blk.at({0, 2}) == 7.0);
  }
  SECTION("weight mismatch is an error") {
    SymTensor f(2);
    REQUIRE_THROWS_WITH(d_alpha(f, AlphaIndex({3}), m),
                        Catch::Matchers::ContainsSubstring("degree/weight error"));
  }
}

TEST_CASE("s_alpha symmetrizes within classes") {
  const int m = 2;
  SECTION("two singletons average the transpositions") {
    DenseBlockFn g;
    g.alpha = AlphaIndex({2});
    g.m = m;
    g.vals = {0.0, 1.0, 5.0, 2.0};  // g(0,0), g(1,0), g(0,1), g(1,1)
    auto s = s_alpha(g);
    REQUIRE(s.vals[1] == Catch::Approx(3.0));
    REQUIRE(s.vals[2] == Catch::Approx(3.0));
    REQUIRE(s.vals[0] == Catch::Approx(0.0));
    REQUIRE(s.vals[3] == Catch::Approx(2.0));
  }
  SECTION("a single variable is untouched") {
    DenseBlockFn g;
    g.alpha = AlphaIndex({1});
    g.m = m;
    g.vals = {4.0, -1.0};
    auto s = s_alpha(g);
    REQUIRE(s.vals == g.vals);
  }
  SECTION("projector: idempotent and self-adjoint") {
    Grid grid({0.5, 0.5});
    DenseBlockFn g, h;
    g.alpha = h.alpha = AlphaIndex({2, 1});
    g.m = h.m = m;
    g.vals.resize(8);
    h.vals.resize(8);
    for (auto& v : g.vals) v = next_uniform();
    for (auto& v : h.vals) v = next_uniform();
    auto sg = s_alpha(g);
    auto ssg = s_alpha(sg);
    for (std::size_t i = 0; i < sg.vals.size(); ++i)
      REQUIRE(std::fabs(ssg.vals[i] - sg.vals[i]) <= 1e-14);
    REQUIRE(dense_inner(s_alpha(g), h, grid) ==
            Catch::Approx(dense_inner(g, s_alpha(h), grid)).margin(1e-14));
  }
}

TEST_CASE("u_n coordinates on the standard instance") {
  StandardInstance si;
  SECTION("degree one is a single block") {
    SymTensor f(1);
    f.vals[{0}] = 1.0;
    f.vals[{1}] = -1.0;
    auto v = u_n(si.space, f);
    REQUIRE(v.blocks.size() == 1);
    REQUIRE(v.at(AlphaIndex({1}), {0}) == 1.0);
    REQUIRE(v.at(AlphaIndex({1}), {1}) == -1.0);
  }
  SECTION("phi (x)^ phi populates both weight-2 blocks") {
    auto f = sym_product({si.phi, si.phi});
    auto v = u_n(si.space, f);
    REQUIRE(v.at(AlphaIndex({2}), {0, 0}) == 1.0);
    REQUIRE(v.at(AlphaIndex({2}), {0, 1}) == -1.0);
    REQUIRE(v.at(AlphaIndex({2}), {1, 1}) == 1.0);
    REQUIRE(v.at(AlphaIndex({0, 1}), {0}) == 1.0);  // phi^2
    REQUIRE(v.at(AlphaIndex({0, 1}), {1}) == 1.0);
  }
  SECTION("the ungraded norm realizes the K-weighted block sum") {
    auto f = sym_product({si.phi, si.phi});
    auto v = u_n(si.space, f);
    // ||phi||^4 + (b_1^2/2) * integral phi^4 = 1 + 1/2
    REQUIRE(inner_ext(si.space, v, v) / factorial_d(2) == Catch::Approx(1.5));
  }
}

TEST_CASE("inner_ext anchors on the standard instance") {
  StandardInstance si;
  REQUIRE(inner_ext(si.space, ext_vacuum(), ext_vacuum()) == 1.0);

  SymTensor fphi(1), fpsi(1);
  fphi.vals[{0}] = 1.0;
  fphi.vals[{1}] = -1.0;
  fpsi.vals[{0}] = 1.0;
  fpsi.vals[{1}] = 1.0;
  REQUIRE(inner_ext(si.space, u_n(si.space, fphi), u_n(si.space, fpsi)) == Catch::Approx(0.0));

  auto v = u_n(si.space, sym_product({si.phi, si.phi}));
  REQUIRE(inner_ext(si.space, v, v) == Catch::Approx(3.0));
}

TEST_CASE("pure singleton block carries n! times the symmetric inner product") {
  Grid grid({0.4, 0.35, 0.25});
  JacobiMatrix J{{0.3, -0.2, 0.9}, {1.1, 0.7}, false};
  ExtSpace space(grid, J, 3);
  for (int n = 1; n <= 3; ++n) {
    SymTensor f(n), g(n);
    for (const auto& key : enumerate_multisets(3, n)) {
      f.vals[key] = next_uniform();
      g.vals[key] = next_uniform();
    }
    // restrict both embeddings to alpha = (n, 0, ...)
    ExtVector uf, ug;
    uf.blocks[AlphaIndex({n})] = d_alpha(f, AlphaIndex({n}), 3);
    ug.blocks[AlphaIndex({n})] = d_alpha(g, AlphaIndex({n}), 3);
    REQUIRE(inner_ext(space, uf, ug) ==
            Catch::Approx(factorial_d(n) * sym_inner(f, g, grid)).margin(1e-12));
  }
}

TEST_CASE("u_n images of the tensor basis have positive definite Gram") {
  StandardInstance si;
  for (int n = 1; n <= 3; ++n) {
    const auto keys = enumerate_multisets(2, n);
    std::vector<ExtVector> imgs;
    for (const auto& key : keys) {
      SymTensor f(n);
      f.vals[key] = 1.0;
      imgs.push_back(u_n(si.space, f));
    }
    Eigen::MatrixXd G(keys.size(), keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
      for (std::size_t j = 0; j < keys.size(); ++j)
        G(i, j) = inner_ext(si.space, imgs[i], imgs[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    REQUIRE(es.eigenvalues().minCoeff() > 0.0);
  }
}
