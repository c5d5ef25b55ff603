#pragma once

#include <cmath>

#include "cohft/apcomplex.hpp"
#include "cohft/rational.hpp"

namespace cohft {

// Scalar backend traits. Code elsewhere is templated over S and uses only this
// surface, so the exact-rational and float backends stay interchangeable.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_long(long v) { return Rational(v); }
  static Rational from_rational(const Rational& q) { return q; }
  static bool is_zero(const Rational& x) { return x == 0; }
  static Rational conj(const Rational& x) { return x; }
  // Pivot quality for elimination; exact backend only cares about nonzero.
  static double pivot_size(const Rational& x) { return x == 0 ? 0.0 : 1.0; }
  static bool sqrt(const Rational& x, Rational& out) { return rational_sqrt(x, out); }
  static std::string str(const Rational& x) { return rational_to_string(x); }
  static double abs_double(const Rational& x) { return std::abs(x.get_d()); }
};

template <>
struct ScalarOps<Complex> {
  static constexpr bool exact = false;
  static Complex zero() { return Complex(0); }
  static Complex one() { return Complex(1); }
  static Complex from_long(long v) { return Complex(v); }
  static Complex from_rational(const Rational& q) { return Complex::from_rational(q); }
  static bool is_zero(const Complex& x) { return abs(x) <= FloatContext::tolerance(); }
  static Complex conj(const Complex& x) { return cohft::conj(x); }
  static double pivot_size(const Complex& x) { return static_cast<double>(abs(x)); }
  static bool sqrt(const Complex& x, Complex& out) {
    out = cohft::sqrt(x);
    return true;
  }
  static std::string str(const Complex& x) {
    return "(" + real_to_string(x.re) + ", " + real_to_string(x.im) + ")";
  }
  static double abs_double(const Complex& x) { return static_cast<double>(abs(x)); }
};

// Integer power with either sign; base must be invertible when e < 0.
template <class S>
S scalar_ipow(S base, long e) {
  if (e < 0) {
    base = ScalarOps<S>::one() / base;
    e = -e;
  }
  S r = ScalarOps<S>::one();
  while (e > 0) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

}  // namespace cohft
