#include <catch2/catch_amalgamated.hpp>

#include "cohft/apcomplex.hpp"
#include "cohft/correlator.hpp"
#include "cohft/eigen.hpp"
#include "cohft/euler.hpp"
#include "cohft/intersect.hpp"
#include "cohft/io.hpp"
#include "cohft/matrix.hpp"
#include "cohft/nodal.hpp"
#include "cohft/rational.hpp"
#include "cohft/series.hpp"
#include "cohft/tft.hpp"

using namespace cohft;

TEST_CASE("rational strings and arithmetic") {
  CHECK(rational_from_string("6/4") == Rational(3, 2));
  CHECK(rational_from_string("-10/5") == Rational(-2));
  CHECK(rational_to_string(Rational(3, 2)) == "3/2");
  CHECK(rational_to_string(Rational(-7)) == "-7");
  CHECK(rational_from_string(rational_to_string(Rational(22, 7))) == Rational(22, 7));
  CHECK_THROWS(rational_from_string("not a number"));

  CHECK(rational_pow(Rational(2, 3), 3) == Rational(8, 27));
  CHECK(rational_pow(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(rational_pow(Rational(5), 0) == Rational(1));

  Rational root;
  CHECK(rational_sqrt(Rational(9, 4), root));
  CHECK(root == Rational(3, 2));
  CHECK_FALSE(rational_sqrt(Rational(2), root));
  CHECK_FALSE(rational_sqrt(Rational(-1), root));

  CHECK(factorial_mpz(5) == 120);
  CHECK(odd_double_factorial(3) == 105);  // 1*3*5*7
  CHECK(binomial(5, 2) == Rational(10));
  CHECK(binomial(5, 0) == Rational(1));
  CHECK(binomial(5, -1) == Rational(0));
  // Negative upper argument follows the generalized definition.
  CHECK(binomial(-1, 3) == Rational(-1));
  CHECK(binomial(-3, 2) == Rational(6));
}

TEST_CASE("matrix inverse, determinant, charpoly") {
  Matrix<Rational> m(2, 2);
  m(0, 0) = 1; m(0, 1) = 2;
  m(1, 0) = 3; m(1, 1) = 5;
  CHECK(m.det() == Rational(-1));
  Matrix<Rational> inv = m.inverse();
  CHECK(matrices_equal(m * inv, Matrix<Rational>::identity(2)));
  CHECK(matrices_equal(inv * m, Matrix<Rational>::identity(2)));

  std::vector<Rational> rhs{Rational(1), Rational(0)};
  auto x = m.solve(rhs);
  CHECK(m.apply(x) == rhs);

  Matrix<Rational> d(2, 2);
  d(0, 0) = 2; d(1, 1) = 3;
  auto cp = d.charpoly();  // (t-2)(t-3) = 6 - 5t + t^2
  REQUIRE(cp.size() == 3);
  CHECK(cp[0] == Rational(6));
  CHECK(cp[1] == Rational(-5));
  CHECK(cp[2] == Rational(1));

  Matrix<Rational> sing(2, 2);
  sing(0, 0) = 1; sing(0, 1) = 2;
  sing(1, 0) = 2; sing(1, 1) = 4;
  CHECK(sing.det() == Rational(0));
  CHECK_THROWS_AS(sing.inverse(), SingularMatrix);

  Matrix<Rational> a(2, 2), b(2, 2);
  a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 3; a(1, 1) = 4;
  b(0, 0) = 5; b(1, 1) = 7;
  Matrix<Rational> k = kron(a, b);
  REQUIRE(k.rows() == 4);
  CHECK(k(0, 0) == Rational(5));
  CHECK(k(1, 1) == Rational(7));
  CHECK(k(0, 2) == Rational(10));
  CHECK(k(3, 3) == Rational(28));
}

TEST_CASE("rational eigenvalues of a small symmetric matrix") {
  Matrix<Rational> m(2, 2);
  m(0, 0) = 2; m(0, 1) = 0;
  m(1, 0) = 0; m(1, 1) = Rational(1, 3);
  auto roots = rational_roots(m.charpoly());
  REQUIRE(roots.has_value());
  std::sort(roots->begin(), roots->end());
  CHECK((*roots)[0] == Rational(1, 3));
  CHECK((*roots)[1] == Rational(2));
}

TEST_CASE("one variable matrix series algebra") {
  int K = 5, N = 2;
  Matrix<Rational> n1(2, 2);
  n1(0, 1) = 1;  // nilpotent step
  Matrix<Rational> n2(2, 2);
  n2(1, 0) = Rational(1, 2);

  EndSeries<Rational> x(K, N);
  x.c[1] = n1;
  x.c[2] = n2;
  EndSeries<Rational> e = es_exp(x);
  CHECK(matrices_equal(e.c[0], Matrix<Rational>::identity(N)));

  // exp(x) * exp(x)^{-1} = Id at every order.
  EndSeries<Rational> p = es_mul(e, es_inverse(e));
  CHECK(es_is_identity(p));

  // Alternate flips odd coefficients only.
  EndSeries<Rational> alt = es_alternate(e);
  CHECK(matrices_equal(alt.c[1], -e.c[1]));
  CHECK(matrices_equal(alt.c[2], e.c[2]));

  // Truncation pads with zeros beyond the stored order.
  EndSeries<Rational> longer = e.truncated(K + 2);
  CHECK(longer.c[static_cast<size_t>(K) + 1].is_zero());
  CHECK(matrices_equal(longer.c[2], e.c[2]));

  // Scalar series log/exp are mutually inverse.
  std::vector<Rational> u{Rational(0), Rational(1, 3), Rational(-2), Rational(5, 7)};
  auto back = scalar_series_log(scalar_series_exp(u));
  for (size_t i = 0; i < u.size(); ++i) CHECK(back[i] == u[i]);

  std::vector<Rational> v{Rational(1), Rational(2)};
  VecSeries<Rational> ev = es_apply_vec(e, v);
  CHECK(ev.c[0] == v);
  CHECK(ev.c[1] == e.c[1].apply(v));
}

TEST_CASE("two variable series and the divided difference") {
  int K = 4, N = 2;
  Matrix<Rational> n1(2, 2);
  n1(0, 1) = 1;
  EndSeries<Rational> x(K, N);
  x.c[1] = n1;
  x.c[3] = n1.scaled(Rational(1, 5));
  EndSeries<Rational> e = es_exp(x);
  EndSeries<Rational> einv = es_inverse(e);

  // f(z1, z2) = E^{-1}(z2) E(-z1) restricts to Id on z2 = -z1 for any
  // invertible E, so the quotient by (z1 + z2) must exist and reconstruct.
  BiSeries<Rational> f = bs_product_z2_z1(einv, es_alternate(e));
  auto dd = divided_difference(f);
  CHECK(dd.antidiagonal_ok);
  CHECK(dd.reconstruction_ok);

  // Same with the roles of E and E^{-1} exchanged.
  BiSeries<Rational> g = bs_product_z2_z1(e, es_alternate(einv));
  auto dg = divided_difference(g);
  CHECK(dg.antidiagonal_ok);
  CHECK(dg.reconstruction_ok);

  // Slices recover the one-variable factors.
  EndSeries<Rational> s1 = bs_slice_z1(f);  // z2 = 0: E^{-1}(0) E(-z1)
  CHECK(matrices_equal(s1.c[1], -e.c[1]));
  EndSeries<Rational> s2 = bs_slice_z2(f);  // z1 = 0: E^{-1}(z2)
  CHECK(matrices_equal(s2.c[1], einv.c[1]));
}

TEST_CASE("divided difference rejects inputs off the constraint") {
  int K = 3, N = 1;
  BiSeries<Rational> f = BiSeries<Rational>::identity(K, N);
  f.at(1, 0)(0, 0) = 1;  // adds z1 alone; antidiagonal no longer Id
  auto dd = divided_difference(f);
  CHECK_FALSE(dd.antidiagonal_ok);
  CHECK_FALSE(dd.reconstruction_ok);
}

TEST_CASE("scalar divided difference matches a hand computation") {
  // f = 1 + (z1 + z2) * (2 - 3 z1 + 5 z2) should invert exactly.
  int K = 3, N = 1;
  BiSeries<Rational> w0(K - 1, N);
  w0.at(0, 0)(0, 0) = 2;
  w0.at(1, 0)(0, 0) = -3;
  w0.at(0, 1)(0, 0) = 5;
  BiSeries<Rational> f = BiSeries<Rational>::identity(K, N);
  for (int p = 0; p <= K - 1; ++p)
    for (int q = 0; p + q <= K - 1; ++q) {
      f.at(p + 1, q) += w0.at(p, q);
      f.at(p, q + 1) += w0.at(p, q);
    }
  auto dd = divided_difference(f);
  REQUIRE(dd.antidiagonal_ok);
  REQUIRE(dd.reconstruction_ok);
  CHECK(dd.w.at(0, 0)(0, 0) == Rational(2));
  CHECK(dd.w.at(1, 0)(0, 0) == Rational(-3));
  CHECK(dd.w.at(0, 1)(0, 0) == Rational(5));
}

TEST_CASE("complex backend basics") {
  Complex a(Real("1.5"), Real("-2"));
  Complex b = a * a;
  CHECK(static_cast<double>(abs(b - Complex(Real("-1.75"), Real("-6")))) < 1e-60);
  Complex inv = Complex(1) / a;
  CHECK(static_cast<double>(abs(a * inv - Complex(1))) < 1e-60);

  // Square roots pick the principal branch.
  Complex s = sqrt(Complex(Real(-4), Real(0)));
  CHECK(static_cast<double>(abs(s - Complex(Real(0), Real(2)))) < 1e-60);

  // Polynomial roots via Aberth: x^2 - 3x + 2.
  std::vector<Complex> coeffs{Complex(2), Complex(-3), Complex(1)};
  auto roots = complex_roots(coeffs);
  REQUIRE(roots.size() == 2);
  std::sort(roots.begin(), roots.end(),
            [](const Complex& l, const Complex& r) { return l.re < r.re; });
  CHECK(static_cast<double>(abs(roots[0] - Complex(1))) < 1e-40);
  CHECK(static_cast<double>(abs(roots[1] - Complex(2))) < 1e-40);
}

TEST_CASE("scalar ops shared surface") {
  CHECK(ScalarOps<Rational>::exact);
  CHECK_FALSE(ScalarOps<Complex>::exact);
  CHECK(ScalarOps<Rational>::is_zero(Rational(0)));
  CHECK_FALSE(ScalarOps<Rational>::is_zero(Rational(1, 1000000)));
  // String parsing canonicalizes; raw two-argument construction must not be
  // fed unreduced fractions (GMP leaves them unnormalized).
  CHECK(ScalarOps<Rational>::from_rational(rational_from_string("2/6")) == Rational(1, 3));
  CHECK(scalar_ipow(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(ScalarOps<Rational>::abs_double(Rational(-3, 2)) == 1.5);

  Rational r;
  CHECK(ScalarOps<Rational>::sqrt(Rational(4, 9), r));
  CHECK(r == Rational(2, 3));
  Complex c;
  CHECK(ScalarOps<Complex>::sqrt(Complex(Real(-9)), c));
  CHECK(static_cast<double>(abs(c * c - Complex(Real(-9)))) < 1e-60);
}
