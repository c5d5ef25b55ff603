#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "cohft/matrix.hpp"

namespace cohft {

// All rational roots of a monic polynomial with rational coefficients
// (constant term first). Returns nullopt unless the polynomial splits over Q.
inline std::optional<std::vector<Rational>> rational_roots(std::vector<Rational> coeffs) {
  int deg = static_cast<int>(coeffs.size()) - 1;
  std::vector<Rational> roots;
  auto eval = [](const std::vector<Rational>& p, const Rational& x) {
    Rational v(0);
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) v = v * x + p[i];
    return v;
  };
  while (deg > 0) {
    // Strip zero roots cheaply.
    if (coeffs[0] == 0) {
      roots.emplace_back(0);
      coeffs.erase(coeffs.begin());
      --deg;
      continue;
    }
    // Clear denominators: integer polynomial a_deg x^deg + ... + a_0.
    mpz_class lcm = 1;
    for (const auto& c : coeffs) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<mpz_class> ip;
    ip.reserve(coeffs.size());
    for (const auto& c : coeffs) {
      mpq_class scaled = c * Rational(lcm);
      ip.push_back(scaled.get_num());
    }
    auto divisors = [](mpz_class v) {
      std::vector<mpz_class> out;
      v = abs(v);
      for (mpz_class d = 1; d * d <= v; ++d) {
        if (v % d == 0) {
          out.push_back(d);
          out.push_back(v / d);
        }
      }
      return out;
    };
    bool found = false;
    for (const auto& p : divisors(ip.front())) {
      for (const auto& q : divisors(ip.back())) {
        for (int sign = 0; sign < 2 && !found; ++sign) {
          Rational cand = sign ? Rational(-p, q) : Rational(p, q);
          cand.canonicalize();
          if (eval(coeffs, cand) == 0) {
            roots.push_back(cand);
            // Deflate by (x - cand), synthetic division from the top.
            std::vector<Rational> next(deg);
            Rational carry = coeffs[deg];
            for (int i = deg - 1; i >= 0; --i) {
              next[i] = carry;
              carry = coeffs[i] + carry * cand;
            }
            coeffs = std::move(next);
            --deg;
            found = true;
          }
        }
        if (found) break;
      }
      if (found) break;
    }
    if (!found) return std::nullopt;
  }
  return roots;
}

// Durand-Kerner iteration for all complex roots of a monic polynomial
// (constant term first).
inline std::vector<Complex> complex_roots(std::vector<Complex> coeffs) {
  int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg <= 0) return {};
  Complex lead = coeffs.back();
  for (auto& c : coeffs) c /= lead;
  auto eval = [&](const Complex& x) {
    Complex v(0);
    for (int i = deg; i >= 0; --i) v = v * x + coeffs[i];
    return v;
  };
  // Radius bound 1 + max|a_i| keeps the seeds around the root annulus.
  Real radius(1);
  for (int i = 0; i < deg; ++i) radius = std::max(radius, abs(coeffs[i]));
  radius += 1;
  std::vector<Complex> z(deg);
  Complex seed(Real("0.4"), Real("0.9"));
  Complex acc(1);
  for (int i = 0; i < deg; ++i) {
    acc *= seed;
    z[i] = acc * Complex(radius);
  }
  const Real tol = FloatContext::tolerance();
  for (int iter = 0; iter < 2000; ++iter) {
    Real worst(0);
    for (int i = 0; i < deg; ++i) {
      Complex d(1);
      for (int j = 0; j < deg; ++j)
        if (j != i) d *= (z[i] - z[j]);
      Complex step = eval(z[i]) / d;
      z[i] -= step;
      worst = std::max(worst, abs(step));
    }
    if (worst < tol) break;
  }
  return z;
}

template <class S>
struct EigenSolve;

template <>
struct EigenSolve<Rational> {
  static std::optional<std::vector<Rational>> eigenvalues(const Matrix<Rational>& m) {
    return rational_roots(m.charpoly());
  }
};

template <>
struct EigenSolve<Complex> {
  static std::optional<std::vector<Complex>> eigenvalues(const Matrix<Complex>& m) {
    return complex_roots(m.charpoly());
  }
};

template <class S>
void sort_lex_re_im(std::vector<S>& vals);

inline bool lex_less(const Rational& a, const Rational& b) { return a < b; }

template <>
inline void sort_lex_re_im<Rational>(std::vector<Rational>& vals) {
  std::sort(vals.begin(), vals.end());
}

template <>
inline void sort_lex_re_im<Complex>(std::vector<Complex>& vals) {
  std::sort(vals.begin(), vals.end(), [](const Complex& a, const Complex& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  });
}

}  // namespace cohft
