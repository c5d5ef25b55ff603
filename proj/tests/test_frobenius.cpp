#include <catch2/catch_amalgamated.hpp>

#include "cohft/frobenius.hpp"

using namespace cohft;

namespace {

// Quantum cohomology of the projective line at q = 1: basis (1, h) with
// h*h = 1, counit theta(1) = 0, theta(h) = 1.
template <class S>
FrobeniusAlgebra<S> qh_p1() {
  FrobeniusAlgebra<S> a;
  a.structure.assign(2, Matrix<S>(2, 2));
  a.structure[0](0, 0) = ScalarOps<S>::one();
  a.structure[0](1, 1) = ScalarOps<S>::one();
  a.structure[1](0, 1) = ScalarOps<S>::one();
  a.structure[1](1, 0) = ScalarOps<S>::one();
  a.pairing = Matrix<S>(2, 2);
  a.pairing(0, 1) = ScalarOps<S>::one();
  a.pairing(1, 0) = ScalarOps<S>::one();
  a.unit = {ScalarOps<S>::one(), ScalarOps<S>::zero()};
  return a;
}

// Dual numbers: x * x = 0 with theta(x) = 1. Frobenius but not semisimple.
FrobeniusAlgebra<Rational> dual_numbers() {
  FrobeniusAlgebra<Rational> a;
  a.structure.assign(2, Matrix<Rational>(2, 2));
  a.structure[0](0, 0) = 1;
  a.structure[1](0, 1) = 1;
  a.structure[1](1, 0) = 1;
  a.pairing = Matrix<Rational>(2, 2);
  a.pairing(0, 1) = 1;
  a.pairing(1, 0) = 1;
  a.unit = {Rational(1), Rational(0)};
  return a;
}

}  // namespace

TEST_CASE("validate accepts the stock constructions") {
  CHECK(FrobeniusAlgebra<Rational>::semisimple_diagonal({Rational(2), Rational(3)})
            .validate()
            .empty());
  CHECK(FrobeniusAlgebra<Rational>::orthonormal_frame({Rational(1), Rational(1)})
            .validate()
            .empty());
  CHECK(qh_p1<Rational>().validate().empty());
  CHECK(dual_numbers().validate().empty());
}

TEST_CASE("validate flags each axiom violation") {
  auto base = qh_p1<Rational>();

  auto bad = base;
  bad.pairing(0, 1) = 2;  // asymmetric
  auto errs = bad.validate();
  REQUIRE(!errs.empty());
  CHECK(errs.front().find("symmetric") != std::string::npos);

  bad = base;
  bad.pairing = Matrix<Rational>(2, 2);
  bad.pairing(0, 0) = 1;  // beta(h, -) = 0
  errs = bad.validate();
  bool degenerate_or_invariant = false;
  for (const auto& e : errs)
    if (e.find("degenerate") != std::string::npos || e.find("invariant") != std::string::npos)
      degenerate_or_invariant = true;
  CHECK(degenerate_or_invariant);

  bad = base;
  bad.pairing(1, 1) = 1;  // symmetric and invertible but not invariant
  errs = bad.validate();
  bool invariance_flagged = false;
  for (const auto& e : errs)
    if (e.find("invariant") != std::string::npos) invariance_flagged = true;
  CHECK(invariance_flagged);

  bad = base;
  bad.structure[0](0, 1) = 1;  // e0*e1 != e1*e0
  errs = bad.validate();
  bool comm_flagged = false;
  for (const auto& e : errs)
    if (e.find("commutative") != std::string::npos) comm_flagged = true;
  CHECK(comm_flagged);

  bad = base;
  bad.unit = {Rational(2), Rational(0)};
  errs = bad.validate();
  bool unit_flagged = false;
  for (const auto& e : errs)
    if (e.find("unit") != std::string::npos) unit_flagged = true;
  CHECK(unit_flagged);

  // Associativity violation: tweak e1*e1 to e1 while keeping commutativity.
  bad = base;
  bad.structure[0](1, 1) = 0;
  bad.structure[1](1, 1) = 1;
  errs = bad.validate();
  bool assoc_or_invariance = !errs.empty();
  CHECK(assoc_or_invariance);
}

TEST_CASE("multiplication operators and the counit") {
  auto a = qh_p1<Rational>();
  std::vector<Rational> h{Rational(0), Rational(1)};
  Matrix<Rational> lh = a.mult_operator(h);
  CHECK(lh(0, 0) == Rational(0));
  CHECK(lh(0, 1) == Rational(1));
  CHECK(lh(1, 0) == Rational(1));
  CHECK(lh(1, 1) == Rational(0));
  CHECK(a.theta_of(a.unit) == Rational(0));
  CHECK(a.theta_of(h) == Rational(1));
  CHECK(a.beta(h, h) == Rational(0));
  CHECK(a.beta(a.unit, h) == Rational(1));

  // beta-adjoint: multiplication operators are self-adjoint by invariance.
  CHECK(matrices_equal(a.adjoint(lh), lh));
  Matrix<Rational> m(2, 2);
  m(0, 1) = 1;
  Matrix<Rational> mt = a.adjoint(m);
  // beta(m x, y) = beta(x, adj(m) y) on all basis pairs.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto ei = a.basis_vector(i);
      auto ej = a.basis_vector(j);
      CHECK(a.beta(m.apply(ei), ej) == a.beta(ei, mt.apply(ej)));
    }
}

TEST_CASE("euler element solves beta(alpha, x) = tr(L_x)") {
  auto a = qh_p1<Rational>();
  auto alpha = a.euler_element();
  CHECK(alpha == std::vector<Rational>{Rational(0), Rational(2)});

  auto diag = FrobeniusAlgebra<Rational>::semisimple_diagonal({Rational(2), Rational(3)});
  auto alpha2 = diag.euler_element();
  CHECK(alpha2 == std::vector<Rational>{Rational(1, 2), Rational(1, 3)});

  // Defining property on a batch of elements.
  for (int j = 0; j < 2; ++j) {
    auto ej = a.basis_vector(j);
    CHECK(a.beta(alpha, ej) == a.mult_operator(ej).trace());
  }
}

TEST_CASE("semisimplicity detection") {
  CHECK(qh_p1<Rational>().is_semisimple());
  CHECK(FrobeniusAlgebra<Rational>::semisimple_diagonal({Rational(2), Rational(3)})
            .is_semisimple());
  CHECK_FALSE(dual_numbers().is_semisimple());

  auto res = dual_numbers().idempotent_decomposition();
  CHECK_FALSE(res.ok);
  CHECK(res.error.find("semisimple") != std::string::npos);
}

TEST_CASE("idempotent frame over the rationals") {
  auto diag = FrobeniusAlgebra<Rational>::semisimple_diagonal({Rational(2), Rational(3)});
  auto res = diag.idempotent_decomposition();
  REQUIRE(res.ok);
  REQUIRE(res.frame.idempotents.size() == 2);
  // Basis vectors in some canonical order; thetas follow the idempotents.
  std::vector<Rational> thetas = res.frame.thetas;
  std::sort(thetas.begin(), thetas.end());
  CHECK(thetas == std::vector<Rational>{Rational(2), Rational(3)});
  // 2 and 3 are not rational squares.
  CHECK_FALSE(res.frame.has_sqrt);

  auto p1 = qh_p1<Rational>();
  auto res2 = p1.idempotent_decomposition();
  REQUIRE(res2.ok);
  std::vector<Rational> th = res2.frame.thetas;
  std::sort(th.begin(), th.end());
  CHECK(th == std::vector<Rational>{Rational(-1, 2), Rational(1, 2)});
  CHECK_FALSE(res2.frame.has_sqrt);

  // Idempotent coordinates of the unit are all ones.
  auto coords = p1.frame_coordinates(res2.frame, p1.unit);
  CHECK(coords == std::vector<Rational>{Rational(1), Rational(1)});
  // xi0 = 2h has coordinates u_i = +-2.
  auto u = p1.frame_coordinates(res2.frame, {Rational(0), Rational(2)});
  std::vector<Rational> su = u;
  std::sort(su.begin(), su.end());
  CHECK(su == std::vector<Rational>{Rational(-2), Rational(2)});
}

TEST_CASE("idempotent frame over the complex backend carries square roots") {
  auto p1 = qh_p1<Complex>();
  auto res = p1.idempotent_decomposition();
  REQUIRE(res.ok);
  REQUIRE(res.frame.has_sqrt);
  REQUIRE(res.frame.sqrt_thetas.size() == 2);

  // pi^T beta pi = Id within tolerance.
  Matrix<Complex> bt = res.frame.pi.transpose() * p1.pairing * res.frame.pi;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex want = i == j ? Complex(1) : Complex(0);
      CHECK(static_cast<double>(abs(bt(i, j) - want)) < 1e-30);
    }

  // Each normalized column squares back to theta_i^{-1/2} times itself.
  for (size_t i = 0; i < 2; ++i) {
    const auto& sq = res.frame.sqrt_thetas[i];
    CHECK(static_cast<double>(abs(sq * sq - res.frame.thetas[i])) < 1e-30);
  }
}

TEST_CASE("orthonormal frame structure constants") {
  std::vector<Rational> sq{Rational(1), Rational(1)};
  auto a = FrobeniusAlgebra<Rational>::orthonormal_frame(sq);
  CHECK(a.validate().empty());
  CHECK(matrices_equal(a.pairing, Matrix<Rational>::identity(2)));
  CHECK(a.unit == sq);
  // e_i * e_i = e_i / sqrt(theta_i) with sqrt(theta) = 1 here.
  auto prod = a.multiply(a.basis_vector(0), a.basis_vector(0));
  CHECK(prod == std::vector<Rational>{Rational(1), Rational(0)});
  CHECK(a.multiply(a.basis_vector(0), a.basis_vector(1)) ==
        std::vector<Rational>{Rational(0), Rational(0)});

  auto scaled = FrobeniusAlgebra<Rational>::orthonormal_frame({Rational(2), Rational(1)});
  CHECK(scaled.validate().empty());
  // theta_i = 4: e_0 e_0 = e_0 / 2.
  CHECK(scaled.multiply(scaled.basis_vector(0), scaled.basis_vector(0)) ==
        std::vector<Rational>{Rational(1, 2), Rational(0)});
}
