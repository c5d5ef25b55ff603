#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "cohft/rational.hpp"

namespace cohft {

// Arbitrary-precision real, precision set globally per run (bits).
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

struct FloatContext {
  static unsigned& bits() {
    static unsigned b = 256;
    return b;
  }
  static Real& tolerance() {
    static Real tol("1e-40");
    return tol;
  }
  static void configure(unsigned precision_bits, const std::string& tol) {
    bits() = precision_bits;
    // boost tracks decimal digits; 1 bit ~ log10(2) digits, round up.
    unsigned digits = static_cast<unsigned>(precision_bits * 0.30103) + 2;
    Real::default_precision(digits);
    tolerance() = Real(tol);
  }
};

namespace detail {
// Applies the default precision before main so no caller can accidentally
// compute at the library default of ~20 digits.
struct FloatContextInit {
  FloatContextInit() { FloatContext::configure(FloatContext::bits(), "1e-40"); }
};
inline const FloatContextInit float_context_init{};
}  // namespace detail

struct Complex {
  Real re, im;

  Complex() : re(0), im(0) {}
  Complex(const Real& r) : re(r), im(0) {}
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(long v) : re(v), im(0) {}
  Complex(int v) : re(v), im(0) {}

  static Complex from_rational(const Rational& q) {
    Real n(q.get_num().get_str());
    Real d(q.get_den().get_str());
    return Complex(n / d);
  }
  static Complex i() { return Complex(Real(0), Real(1)); }

  Complex operator-() const { return Complex(-re, -im); }
  Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
  Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    Real i2 = re * o.im + im * o.re;
    re = r; im = i2;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    Real i2 = (im * o.re - re * o.im) / d;
    re = r; im = i2;
    return *this;
  }
  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

inline Complex conj(const Complex& z) { return Complex(z.re, -z.im); }

inline Real abs(const Complex& z) {
  using boost::multiprecision::sqrt;
  return sqrt(z.re * z.re + z.im * z.im);
}

inline Complex sqrt(const Complex& z) {
  using boost::multiprecision::sqrt;
  if (z.im == 0) {
    if (z.re >= 0) return Complex(sqrt(z.re));
    return Complex(Real(0), sqrt(-z.re));
  }
  Real r = abs(z);
  Real u = sqrt((r + z.re) / 2);
  Real v = sqrt((r - z.re) / 2);
  if (z.im < 0) v = -v;
  return Complex(u, v);
}

inline Complex exp(const Complex& z) {
  using boost::multiprecision::exp;
  using boost::multiprecision::cos;
  using boost::multiprecision::sin;
  Real m = exp(z.re);
  return Complex(m * cos(z.im), m * sin(z.im));
}

inline Complex log(const Complex& z) {
  using boost::multiprecision::log;
  using boost::multiprecision::atan2;
  return Complex(log(abs(z)), atan2(z.im, z.re));
}

inline std::string real_to_string(const Real& r, unsigned digits = 0) {
  std::ostringstream os;
  os << std::setprecision(digits ? digits : Real::default_precision()) << r;
  return os.str();
}

}  // namespace cohft
