#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cohft {

using Rational = mpq_class;

inline Rational rational_from_string(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("bad rational literal: " + s);
  q.canonicalize();
  return q;
}

inline std::string rational_to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// q^e for integer e of either sign; q must be nonzero when e < 0.
inline Rational rational_pow(const Rational& q, long e) {
  if (e == 0) return Rational(1);
  mpq_class base = q;
  bool neg = e < 0;
  unsigned long ue = neg ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  if (neg) {
    if (base == 0) throw std::domain_error("rational_pow: 0 to negative power");
    base = 1 / base;
  }
  mpq_class r;
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), ue);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), ue);
  r.canonicalize();
  return r;
}

// Exact square root when q is a perfect square of a rational; false otherwise.
inline bool rational_sqrt(const Rational& q, Rational& out) {
  if (q < 0) return false;
  if (q == 0) { out = 0; return true; }
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  out = Rational(rn, rd);
  return true;
}

inline mpz_class factorial_mpz(long n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

// (2k+1)!! for k >= -1; (-1)!! = 1 by convention.
inline mpz_class odd_double_factorial(long k) {
  if (k < 0) return 1;
  mpz_class r = 1;
  for (long t = 1; t <= 2 * k + 1; t += 2) r *= t;
  return r;
}

// Binomial coefficient with arbitrary integer upper argument (n may be negative).
inline Rational binomial(long n, long m) {
  if (m < 0) return Rational(0);
  Rational r(1);
  for (long t = 0; t < m; ++t) {
    Rational f(n - t, t + 1);
    f.canonicalize();
    r *= f;
  }
  return r;
}

}  // namespace cohft
