#include <catch2/catch_amalgamated.hpp>

#include "cohft/tft.hpp"

using namespace cohft;

namespace {

FrobeniusAlgebra<Rational> theta23() {
  return FrobeniusAlgebra<Rational>::semisimple_diagonal({Rational(2), Rational(3)});
}

FrobeniusAlgebra<Rational> qh_p1() {
  FrobeniusAlgebra<Rational> a;
  a.structure.assign(2, Matrix<Rational>(2, 2));
  a.structure[0](0, 0) = 1;
  a.structure[0](1, 1) = 1;
  a.structure[1](0, 1) = 1;
  a.structure[1](1, 0) = 1;
  a.pairing = Matrix<Rational>(2, 2);
  a.pairing(0, 1) = 1;
  a.pairing(1, 0) = 1;
  a.unit = {Rational(1), Rational(0)};
  return a;
}

}  // namespace

TEST_CASE("handle operator powers") {
  ClosedTft<Rational> tft(theta23());
  CHECK(matrices_equal(tft.handle_operator(0), Matrix<Rational>::identity(2)));
  Matrix<Rational> h2 = tft.handle_operator(2);
  CHECK(h2(0, 0) == Rational(1, 4));
  CHECK(h2(1, 1) == Rational(1, 9));
  CHECK(h2(0, 1) == Rational(0));

  // Quantum P1: one handle multiplies by the euler element 2h.
  ClosedTft<Rational> p1(qh_p1());
  Matrix<Rational> h1 = p1.handle_operator(1);
  CHECK(h1(0, 0) == Rational(0));
  CHECK(h1(0, 1) == Rational(2));
  CHECK(h1(1, 0) == Rational(2));
  CHECK(h1(1, 1) == Rational(0));
}

TEST_CASE("partition functions") {
  ClosedTft<Rational> tft(theta23());
  CHECK(tft.partition_function(0) == Rational(2) + Rational(3));
  CHECK(tft.partition_function(1) == Rational(2));
  CHECK(tft.partition_function(2) == Rational(1, 2) + Rational(1, 3));
  CHECK(tft.partition_function(3) == Rational(1, 4) + Rational(1, 9));
}

TEST_CASE("frame propagator equals brute force sewing on all small signatures") {
  auto alg = theta23();
  ClosedTft<Rational> tft(alg);
  auto frame = alg.idempotent_decomposition();
  REQUIRE(frame.ok);
  int checked = 0;
  for (int g = 0; g <= 3; ++g)
    for (int m = 0; m <= 4; ++m)
      for (int n = 0; m + n <= 4; ++n) {
        auto closed = tft.propagator(frame.frame, {g, m, n});
        auto brute = tft.propagator_composed({g, m, n});
        INFO("signature g=" << g << " m=" << m << " n=" << n);
        CHECK(matrices_equal(closed.mat, brute.mat));
        ++checked;
      }
  CHECK(checked == 4 * 15);

  // The same equivalence holds on a non-diagonal model.
  auto p1alg = qh_p1();
  ClosedTft<Rational> p1(p1alg);
  auto p1frame = p1alg.idempotent_decomposition();
  REQUIRE(p1frame.ok);
  for (int g = 0; g <= 2; ++g)
    for (int m = 0; m <= 3; ++m)
      for (int n = 0; m + n <= 3; ++n) {
        auto closed = p1.propagator(p1frame.frame, {g, m, n});
        auto brute = p1.propagator_composed({g, m, n});
        INFO("p1 signature g=" << g << " m=" << m << " n=" << n);
        CHECK(matrices_equal(closed.mat, brute.mat));
      }
}

TEST_CASE("sewing laws") {
  ClosedTft<Rational> tft(theta23());

  // Cylinder is the sewing identity.
  auto cyl = tft.propagator_composed({0, 1, 1});
  CHECK(matrices_equal(cyl.mat, Matrix<Rational>::identity(2)));
  auto pants = tft.propagator_composed({0, 2, 1});
  auto sewn = ClosedTft<Rational>::sew(cyl, pants, 1);
  CHECK(matrices_equal(sewn.mat, pants.mat));
  CHECK(sewn.components[0].g == 0);
  auto sewn2 = ClosedTft<Rational>::sew(pants, cyl, 1);
  CHECK(matrices_equal(sewn2.mat, pants.mat));

  // Two trinions along one circle: the triple product map.
  auto triple = ClosedTft<Rational>::sew(pants, pants, 1);
  CHECK(triple.n_in == 3);
  CHECK(triple.n_out == 1);
  CHECK(triple.components[0].g == 0);
  CHECK(matrices_equal(triple.mat, tft.propagator_composed({0, 3, 1}).mat));

  // Two trinions along two circles: genus climbs by one per extra circle.
  auto splitter = tft.propagator_composed({0, 1, 2});
  auto torus_tube = ClosedTft<Rational>::sew(splitter, pants, 2);
  CHECK(torus_tube.components[0].g == 1);
  CHECK(torus_tube.n_in == 1);
  CHECK(torus_tube.n_out == 1);
  CHECK(matrices_equal(torus_tube.mat, tft.propagator_composed({1, 1, 1}).mat));

  // Self-sewing the (g,1,1) cylinder closes it into a genus g+1 surface.
  for (int g = 0; g <= 2; ++g) {
    auto open_handle = tft.propagator_composed({g, 1, 1});
    auto closed = ClosedTft<Rational>::self_sew(open_handle);
    CHECK(closed.components[0].g == g + 1);
    CHECK(closed.mat(0, 0) == tft.partition_function(g + 1));
  }

  // Sewing order independence: ((a.b).c) = (a.(b.c)) along chained circles.
  auto abc1 = ClosedTft<Rational>::sew(ClosedTft<Rational>::sew(pants, pants, 1), pants, 1);
  auto abc2 = ClosedTft<Rational>::sew(pants, ClosedTft<Rational>::sew(pants, pants, 1), 1);
  CHECK(matrices_equal(abc1.mat, abc2.mat));

  CHECK_THROWS_AS(ClosedTft<Rational>::sew(pants, pants, 3), std::invalid_argument);
}

TEST_CASE("s diagram identity") {
  // Bent cylinder pair: coevaluation then evaluation is the straight cylinder.
  for (auto alg : {theta23(), qh_p1()}) {
    ClosedTft<Rational> tft(alg);
    auto coev = tft.propagator_composed({0, 0, 2});
    auto ev = tft.propagator_composed({0, 2, 0});
    auto s = ClosedTft<Rational>::sew(coev, ev, 1);
    CHECK(s.n_in == 1);
    CHECK(s.n_out == 1);
    CHECK(s.components[0].g == 0);
    CHECK(matrices_equal(s.mat, Matrix<Rational>::identity(2)));
  }
}

TEST_CASE("disjoint unions tensor the maps") {
  ClosedTft<Rational> tft(theta23());
  auto cap = tft.propagator_composed({0, 1, 0});
  auto cup = tft.propagator_composed({0, 0, 1});
  auto both = ClosedTft<Rational>::tensor(cap, cup);
  CHECK(both.components.size() == 2);
  CHECK(both.n_in == 1);
  CHECK(both.n_out == 1);
  CHECK(matrices_equal(both.mat, kron(cap.mat, cup.mat)));

  // A disconnected operator refuses to sew.
  CHECK_THROWS_AS(ClosedTft<Rational>::sew(both, cap, 1), std::invalid_argument);
}

TEST_CASE("propagator rejects negative signatures") {
  ClosedTft<Rational> tft(theta23());
  CHECK_THROWS_AS(tft.propagator_composed({-1, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(tft.propagator_composed({0, -2, 1}), std::invalid_argument);
}
