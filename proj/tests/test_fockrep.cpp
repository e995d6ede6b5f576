// Copyright (c) Contributors to the levyfock project.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levyfock/fockrep.hpp"
#include "levyfock/measure.hpp"

using namespace levyfock;

namespace {

struct StandardInstance {
  Grid grid{std::vector<double>{0.5, 0.5}};
  JacobiMatrix jacobi{{0.0, 0.0}, {1.0}, true};
  TestFunction phi{std::vector<double>{1.0, -1.0}};
  FockSpace space{grid, jacobi, 6};
};

struct ThreeAtomInstance {
  Grid grid{std::vector<double>{0.5, 0.25, 0.25}};
  JacobiMatrix jacobi = to_jacobi(jacobi_of_measure(
      JumpMeasure::from_atoms(
          {{Rational(1), Rational(1, 2)}, {Rational(2), Rational(1, 4)}, {Rational(-1), Rational(1, 4)}}),
      7));
  std::vector<TestFunction> letters{TestFunction({1, 1, 1}), TestFunction({1, -1, 2}),
                                    TestFunction({2, 1, -1})};
  FockSpace space{grid, jacobi, 6};
};

std::uint64_t rng_state = 99;
double next_uniform() {
  rng_state = rng_state * 6364136223846793005ull + 1442695040888963407ull;
  return 2.0 * ((rng_state >> 11) * 0x1.0p-53) - 1.0;
}

Eigen::VectorXd random_vec(int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = next_uniform();
  return v;
}

double rel_dev(double x, double y) {
  return std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), 1.0});
}

double fock_distance(const FockSpace& s, const FockVector& a, const FockVector& b) {
  return fock_norm(s, fock_axpy(-1.0, b, a));
}

}  // namespace

TEST_CASE("creation, contraction, and one-slot lifting at low degree") {
  StandardInstance si;
  const Eigen::VectorXd h = random_vec(si.space.dim());
  const Eigen::VectorXd g = random_vec(si.space.dim());

  const FockVector h1 = a_plus(si.space, h, fock_vacuum(si.space));
  SECTION("a_plus places the vector at degree one") {
    for (int p = 0; p < si.space.dim(); ++p) {
      auto it = h1.deg[1].find({p});
      REQUIRE((it == h1.deg[1].end() ? 0.0 : it->second) == Catch::Approx(h(p)));
    }
  }
  SECTION("a_minus contracts to the one-particle inner product") {
    const FockVector g1 = a_plus(si.space, g, fock_vacuum(si.space));
    const FockVector w = a_minus(si.space, h, g1);
    REQUIRE(fock_vacuum_component(w) == Catch::Approx(si.space.one_particle_inner(h, g)));
  }
  SECTION("a_zero applies the operator at degree one") {
    Eigen::MatrixXd T(si.space.dim(), si.space.dim());
    for (int i = 0; i < T.size(); ++i) T(i) = next_uniform();
    const FockVector w = a_zero(si.space, T, h1);
    const Eigen::VectorXd th = T * h;
    for (int p = 0; p < si.space.dim(); ++p) {
      auto it = w.deg[1].find({p});
      REQUIRE((it == w.deg[1].end() ? 0.0 : it->second) == Catch::Approx(th(p)).margin(1e-14));
    }
  }
  SECTION("a_zero annihilates the vacuum") {
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(si.space.dim(), si.space.dim());
    REQUIRE(fock_norm(si.space, a_zero(si.space, T, fock_vacuum(si.space))) == 0.0);
  }
}

TEST_CASE("creation and annihilation are adjoint under the grading") {
  ThreeAtomInstance ti;
  const Eigen::VectorXd h = random_vec(ti.space.dim());
  double worst = 0.0;
  for (int n = 0; n <= 2; ++n) {
    // random sparse degree-n and degree-(n+1) vectors
    FockVector F(ti.space.max_degree), G(ti.space.max_degree);
    for (const auto& key : enumerate_multisets(ti.space.dim(), n)) F.deg[n][key] = next_uniform();
    for (const auto& key : enumerate_multisets(ti.space.dim(), n + 1))
      G.deg[n + 1][key] = next_uniform();
    const double lhs = fock_inner(ti.space, a_plus(ti.space, h, F), G);
    const double rhs = fock_inner(ti.space, F, a_minus(ti.space, h, G));
    worst = std::max(worst, rel_dev(lhs, rhs));
  }
  REQUIRE(worst <= 1e-12);
}

TEST_CASE("canonical commutation surrogate") {
  StandardInstance si;
  const Eigen::VectorXd h = random_vec(si.space.dim());
  const Eigen::VectorXd g = random_vec(si.space.dim());
  double worst = 0.0;
  for (int n = 0; n <= 2; ++n) {
    FockVector F(si.space.max_degree), G(si.space.max_degree);
    for (const auto& key : enumerate_multisets(si.space.dim(), n)) {
      F.deg[n][key] = next_uniform();
      G.deg[n][key] = next_uniform();
    }
    const double comm = fock_inner(si.space, F, a_minus(si.space, h, a_plus(si.space, g, G))) -
                        fock_inner(si.space, F, a_plus(si.space, g, a_minus(si.space, h, G)));
    const double expected = si.space.one_particle_inner(h, g) * fock_inner(si.space, F, G);
    worst = std::max(worst, rel_dev(comm, expected));
  }
  REQUIRE(worst <= 1e-12);
}

TEST_CASE("second quantization adjoint is the weighted transpose") {
  StandardInstance si;
  const int d = si.space.dim();
  Eigen::MatrixXd T(d, d);
  for (int i = 0; i < T.size(); ++i) T(i) = next_uniform();
  Eigen::MatrixXd Tstar(d, d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      Tstar(q, p) = T(p, q) * si.space.point_weight(p) / si.space.point_weight(q);
  FockVector F(si.space.max_degree), G(si.space.max_degree);
  for (const auto& key : enumerate_multisets(d, 2)) {
    F.deg[2][key] = next_uniform();
    G.deg[2][key] = next_uniform();
  }
  REQUIRE(rel_dev(fock_inner(si.space, a_zero(si.space, T, F), G),
                  fock_inner(si.space, F, a_zero(si.space, Tstar, G))) <= 1e-13);
}

TEST_CASE("field operator anchors") {
  StandardInstance si;
  SECTION("A(phi) on the vacuum is e0 x phi") {
    const FockVector v = a_field(si.space, Part::full, si.phi, fock_vacuum(si.space));
    const Eigen::VectorXd g0 = si.space.ground_composite(si.phi);
    double dist = 0.0;
    for (int p = 0; p < si.space.dim(); ++p) {
      auto it = v.deg[1].find({p});
      dist = std::max(dist, std::fabs((it == v.deg[1].end() ? 0.0 : it->second) - g0(p)));
    }
    REQUIRE(dist <= 1e-15);
    REQUIRE(fock_vacuum_component(v) == 0.0);
  }
  SECTION("fourth vacuum moment equals 4 on the standard instance") {
    REQUIRE(vacuum_word_moment_a(si.space, {si.phi, si.phi, si.phi, si.phi}) == Catch::Approx(4.0));
  }
  SECTION("third vacuum moment is a_0 times the cubic integral") {
    ThreeAtomInstance ti;
    const auto& L = ti.letters;
    const double lhs = vacuum_word_moment_a(ti.space, {L[0], L[1], L[2]});
    const double rhs =
        ti.jacobi.a[0] *
        integrate(pointwise_product(pointwise_product(L[0], L[1]), L[2]), ti.grid);
    REQUIRE(lhs == Catch::Approx(rhs));
  }
}

TEST_CASE("product-vector formulas agree with the operator route") {
  ThreeAtomInstance ti;
  SECTION("n = 0: creation on the vacuum") {
    REQUIRE(trd_crosscheck(ti.space, Eigen::VectorXd::Unit(ti.space.levels(), 0),
                           ti.letters[0], ti.letters[1], 0) <= 1e-14);
  }
  SECTION("n = 1 and n = 2, hand instances") {
    Eigen::VectorXd e0 = Eigen::VectorXd::Unit(ti.space.levels(), 0);
    REQUIRE(trd_crosscheck(ti.space, e0, ti.letters[1], ti.letters[2], 1) <= 1e-13);
    REQUIRE(trd_crosscheck(ti.space, e0, ti.letters[0], ti.letters[0], 2) <= 1e-13);
  }
  SECTION("random finite vectors up to n = 3") {
    double worst = 0.0;
    for (int n = 0; n <= 3; ++n)
      for (int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXd xi = random_vec(ti.space.levels());
        worst = std::max(worst, trd_crosscheck(ti.space, xi, ti.letters[trial % 3],
                                               ti.letters[(trial + 1) % 3], n));
      }
    REQUIRE(worst <= 1e-12);
  }
}

TEST_CASE("A(phi) is symmetric on low-degree vectors") {
  ThreeAtomInstance ti;
  std::vector<FockVector> vecs;
  vecs.push_back(fock_vacuum(ti.space));
  for (const auto& phi : ti.letters)
    vecs.push_back(a_field(ti.space, Part::full, phi, vecs[0]));
  vecs.push_back(a_field(ti.space, Part::full, ti.letters[0], vecs[1]));
  double worst = 0.0;
  for (const auto& phi : ti.letters) {
    const AFieldOps ops = make_a_field_ops(ti.space, phi);
    std::vector<FockVector> av;
    for (const auto& v : vecs) av.push_back(a_field(ti.space, Part::full, ops, v));
    for (std::size_t i = 0; i < vecs.size(); ++i)
      for (std::size_t j = 0; j < vecs.size(); ++j)
        worst = std::max(worst, rel_dev(fock_inner(ti.space, av[i], vecs[j]),
                                        fock_inner(ti.space, vecs[i], av[j])));
  }
  REQUIRE(worst <= 1e-10);
}

TEST_CASE("truncation flags") {
  SECTION("degree overflow is dropped and flagged") {
    StandardInstance si;
    FockSpace tiny(si.grid, si.jacobi, 1);
    const FockVector v1 = a_field(tiny, Part::full, si.phi, fock_vacuum(tiny));
    REQUIRE_FALSE(v1.truncated);
    const FockVector v2 = a_field(tiny, Part::full, si.phi, v1);
    REQUIRE(v2.truncated);
  }
  SECTION("level overflow flags only genuinely truncated ladders") {
    // gamma2 truncated at M = 2 is incomplete: the raise out of level 1 is lost
    Grid grid({0.5, 0.5});
    TestFunction phi({1.0, -1.0});
    auto J = to_jacobi(jacobi_from_moments(moments(JumpMeasure::from_family("gamma2"), 3), 2));
    REQUIRE_FALSE(J.complete);
    FockSpace space(grid, J, 4);
    FockVector top(space.max_degree);
    top.deg[1][{1 * grid.size() + 0}] = 1.0;  // one particle at the top level
    REQUIRE(a_field(space, Part::plus, phi, top).truncated);
    REQUIRE_FALSE(a_field(space, Part::minus, phi, top).truncated);

    // a complete two-point ladder drops the same raise exactly: no flag
    JacobiMatrix J2{{0.0, 0.0}, {1.0}, true};
    FockSpace space2(grid, J2, 4);
    FockVector top2(space2.max_degree);
    top2.deg[1][{1 * grid.size() + 0}] = 1.0;
    REQUIRE_FALSE(a_field(space2, Part::plus, phi, top2).truncated);
  }
}
