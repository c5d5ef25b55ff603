#pragma once

#include <stdexcept>
#include <vector>

#include "cohft/matrix.hpp"

namespace cohft {

// Truncated End(A)-valued series in one variable, coefficients c[0..K].
template <class S>
struct EndSeries {
  int K = 0;
  int N = 0;
  std::vector<Matrix<S>> c;

  EndSeries() = default;
  EndSeries(int order, int dim)
      : K(order), N(dim), c(static_cast<size_t>(order) + 1, Matrix<S>(dim, dim)) {}

  static EndSeries identity(int order, int dim) {
    EndSeries e(order, dim);
    e.c[0] = Matrix<S>::identity(dim);
    return e;
  }

  const Matrix<S>& coeff(int k) const { return c[static_cast<size_t>(k)]; }
  Matrix<S>& coeff(int k) { return c[static_cast<size_t>(k)]; }

  EndSeries truncated(int order) const {
    EndSeries out(order, N);
    for (int k = 0; k <= order && k <= K; ++k) out.c[k] = c[k];
    return out;
  }
};

template <class S>
EndSeries<S> es_add(const EndSeries<S>& a, const EndSeries<S>& b) {
  if (a.K != b.K || a.N != b.N) throw std::invalid_argument("series shape mismatch");
  EndSeries<S> out = a;
  for (int k = 0; k <= a.K; ++k) out.c[k] += b.c[k];
  return out;
}

template <class S>
EndSeries<S> es_sub(const EndSeries<S>& a, const EndSeries<S>& b) {
  if (a.K != b.K || a.N != b.N) throw std::invalid_argument("series shape mismatch");
  EndSeries<S> out = a;
  for (int k = 0; k <= a.K; ++k) out.c[k] -= b.c[k];
  return out;
}

template <class S>
EndSeries<S> es_mul(const EndSeries<S>& a, const EndSeries<S>& b) {
  if (a.K != b.K || a.N != b.N) throw std::invalid_argument("series shape mismatch");
  EndSeries<S> out(a.K, a.N);
  for (int k = 0; k <= a.K; ++k)
    for (int i = 0; i <= k; ++i) out.c[k] += a.c[i] * b.c[k - i];
  return out;
}

// z -> -z substitution.
template <class S>
EndSeries<S> es_alternate(const EndSeries<S>& a) {
  EndSeries<S> out = a;
  for (int k = 1; k <= a.K; k += 2) out.c[k] = -out.c[k];
  return out;
}

template <class S>
EndSeries<S> es_inverse(const EndSeries<S>& a) {
  EndSeries<S> out(a.K, a.N);
  Matrix<S> inv0 = a.c[0].inverse();
  out.c[0] = inv0;
  for (int k = 1; k <= a.K; ++k) {
    Matrix<S> acc(a.N, a.N);
    for (int j = 1; j <= k; ++j) acc += a.c[j] * out.c[k - j];
    out.c[k] = -(inv0 * acc);
  }
  return out;
}

// exp of a series with vanishing constant term (nilpotent mod z^{K+1}).
template <class S>
EndSeries<S> es_exp(const EndSeries<S>& x) {
  if (!x.c[0].is_zero()) throw std::invalid_argument("es_exp needs zero constant term");
  EndSeries<S> out = EndSeries<S>::identity(x.K, x.N);
  EndSeries<S> pow = EndSeries<S>::identity(x.K, x.N);
  S fact = ScalarOps<S>::one();
  for (int m = 1; m <= x.K; ++m) {
    pow = es_mul(pow, x);
    fact *= ScalarOps<S>::from_long(m);
    for (int k = 0; k <= x.K; ++k) out.c[k] += pow.c[k].scaled(ScalarOps<S>::one() / fact);
  }
  return out;
}

template <class S>
bool es_is_identity(const EndSeries<S>& a) {
  for (int k = 0; k <= a.K; ++k) {
    Matrix<S> ref = (k == 0) ? Matrix<S>::identity(a.N) : Matrix<S>(a.N, a.N);
    if (!matrices_equal(a.c[k], ref)) return false;
  }
  return true;
}

// A-valued (vector) truncated series.
template <class S>
struct VecSeries {
  int K = 0;
  int N = 0;
  std::vector<std::vector<S>> c;

  VecSeries() = default;
  VecSeries(int order, int dim)
      : K(order), N(dim), c(static_cast<size_t>(order) + 1, std::vector<S>(dim, ScalarOps<S>::zero())) {}
};

template <class S>
VecSeries<S> es_apply_vec(const EndSeries<S>& e, const std::vector<S>& v) {
  VecSeries<S> out(e.K, e.N);
  for (int k = 0; k <= e.K; ++k) out.c[k] = e.c[k].apply(v);
  return out;
}

// Scalar truncated series helpers (used componentwise for A-valued log/exp).
template <class S>
std::vector<S> scalar_series_mul(const std::vector<S>& a, const std::vector<S>& b) {
  std::vector<S> out(a.size(), ScalarOps<S>::zero());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; i + j < a.size() && j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// log(u) for scalar series with u[0] = 1.
template <class S>
std::vector<S> scalar_series_log(const std::vector<S>& u) {
  size_t n = u.size();
  std::vector<S> x = u;
  x[0] = ScalarOps<S>::zero();  // u - 1
  std::vector<S> out(n, ScalarOps<S>::zero());
  std::vector<S> pow(n, ScalarOps<S>::zero());
  pow[0] = ScalarOps<S>::one();
  S sign = ScalarOps<S>::one();
  for (size_t m = 1; m < n; ++m) {
    pow = scalar_series_mul(pow, x);
    S coef = sign / ScalarOps<S>::from_long(static_cast<long>(m));
    for (size_t k = 0; k < n; ++k) out[k] += pow[k] * coef;
    sign = -sign;
  }
  return out;
}

// exp(u) for scalar series with u[0] = 0.
template <class S>
std::vector<S> scalar_series_exp(const std::vector<S>& u) {
  size_t n = u.size();
  std::vector<S> out(n, ScalarOps<S>::zero());
  out[0] = ScalarOps<S>::one();
  std::vector<S> pow(n, ScalarOps<S>::zero());
  pow[0] = ScalarOps<S>::one();
  S fact = ScalarOps<S>::one();
  for (size_t m = 1; m < n; ++m) {
    pow = scalar_series_mul(pow, u);
    fact *= ScalarOps<S>::from_long(static_cast<long>(m));
    for (size_t k = 0; k < n; ++k) out[k] += pow[k] / fact;
  }
  return out;
}

// Truncated series in two variables on the triangle p+q <= K.
template <class S>
struct BiSeries {
  int K = 0;
  int N = 0;
  std::vector<std::vector<Matrix<S>>> c;

  BiSeries() = default;
  BiSeries(int order, int dim) : K(order), N(dim) {
    c.resize(static_cast<size_t>(order) + 1);
    for (int p = 0; p <= order; ++p)
      c[p].assign(static_cast<size_t>(order - p) + 1, Matrix<S>(dim, dim));
  }

  static BiSeries identity(int order, int dim) {
    BiSeries b(order, dim);
    b.c[0][0] = Matrix<S>::identity(dim);
    return b;
  }

  const Matrix<S>& at(int p, int q) const { return c[p][q]; }
  Matrix<S>& at(int p, int q) { return c[p][q]; }
};

template <class S>
BiSeries<S> bs_add(const BiSeries<S>& a, const BiSeries<S>& b) {
  BiSeries<S> out = a;
  for (int p = 0; p <= a.K; ++p)
    for (int q = 0; p + q <= a.K; ++q) out.c[p][q] += b.c[p][q];
  return out;
}

template <class S>
BiSeries<S> bs_sub(const BiSeries<S>& a, const BiSeries<S>& b) {
  BiSeries<S> out = a;
  for (int p = 0; p <= a.K; ++p)
    for (int q = 0; p + q <= a.K; ++q) out.c[p][q] -= b.c[p][q];
  return out;
}

template <class S>
BiSeries<S> bs_swap_vars(const BiSeries<S>& a) {
  BiSeries<S> out(a.K, a.N);
  for (int p = 0; p <= a.K; ++p)
    for (int q = 0; p + q <= a.K; ++q) out.c[q][p] = a.c[p][q];
  return out;
}

// F(z2) * G(z1), coefficient of z1^p z2^q is F_q G_p.
template <class S>
BiSeries<S> bs_product_z2_z1(const EndSeries<S>& f, const EndSeries<S>& g) {
  int K = f.K;
  BiSeries<S> out(K, f.N);
  for (int p = 0; p <= K; ++p)
    for (int q = 0; p + q <= K; ++q) out.c[p][q] = f.c[q] * g.c[p];
  return out;
}

// L(z1) * B, composition on the left by a one-variable series in z1.
template <class S>
BiSeries<S> bs_mul_left_z1(const EndSeries<S>& l, const BiSeries<S>& b) {
  BiSeries<S> out(b.K, b.N);
  for (int p = 0; p <= b.K; ++p)
    for (int q = 0; p + q <= b.K; ++q)
      for (int j = 0; j <= p; ++j) out.c[p][q] += l.c[j] * b.c[p - j][q];
  return out;
}

// B * R(z1), composition on the right.
template <class S>
BiSeries<S> bs_mul_right_z1(const BiSeries<S>& b, const EndSeries<S>& r) {
  BiSeries<S> out(b.K, b.N);
  for (int p = 0; p <= b.K; ++p)
    for (int q = 0; p + q <= b.K; ++q)
      for (int j = 0; j <= p; ++j) out.c[p][q] += b.c[p - j][q] * r.c[j];
  return out;
}

// Evaluation on the anti-diagonal z2 = -z1, as a one-variable series.
template <class S>
EndSeries<S> bs_antidiagonal(const BiSeries<S>& b) {
  EndSeries<S> out(b.K, b.N);
  for (int m = 0; m <= b.K; ++m)
    for (int p = 0; p <= m; ++p) {
      int q = m - p;
      if (q % 2 == 0)
        out.c[m] += b.c[p][q];
      else
        out.c[m] -= b.c[p][q];
    }
  return out;
}

// Row/column slices B(z,0) and B(0,z).
template <class S>
EndSeries<S> bs_slice_z1(const BiSeries<S>& b) {
  EndSeries<S> out(b.K, b.N);
  for (int p = 0; p <= b.K; ++p) out.c[p] = b.c[p][0];
  return out;
}

template <class S>
EndSeries<S> bs_slice_z2(const BiSeries<S>& b) {
  EndSeries<S> out(b.K, b.N);
  for (int q = 0; q <= b.K; ++q) out.c[q] = b.c[0][q];
  return out;
}

template <class S>
bool bs_equal(const BiSeries<S>& a, const BiSeries<S>& b) {
  if (a.K != b.K || a.N != b.N) return false;
  for (int p = 0; p <= a.K; ++p)
    for (int q = 0; p + q <= a.K; ++q)
      if (!matrices_equal(a.c[p][q], b.c[p][q])) return false;
  return true;
}

template <class S>
bool bs_is_identity(const BiSeries<S>& a) {
  return bs_equal(a, BiSeries<S>::identity(a.K, a.N));
}

template <class S>
struct DividedDifference {
  BiSeries<S> w;        // order K-1
  bool antidiagonal_ok = false;
  bool reconstruction_ok = false;
};

// Solve (z1+z2) W = F - Id on the truncation triangle. F must restrict to Id
// on z2 = -z1; otherwise the input is rejected via the ok flags.
template <class S>
DividedDifference<S> divided_difference(const BiSeries<S>& f) {
  DividedDifference<S> out;
  int K = f.K, N = f.N;
  BiSeries<S> num = bs_sub(f, BiSeries<S>::identity(K, N));
  EndSeries<S> anti = bs_antidiagonal(num);
  out.antidiagonal_ok = true;
  for (int m = 0; m <= K; ++m)
    if (!anti.c[m].is_zero()) out.antidiagonal_ok = false;

  if (K == 0) {
    out.w = BiSeries<S>(0, N);
    out.reconstruction_ok = out.antidiagonal_ok;
    return out;
  }
  BiSeries<S> w(K - 1, N);
  for (int q = 0; q <= K - 1; ++q)
    for (int p = K - 1 - q; p >= 0; --p) {
      Matrix<S> v = num.c[p + 1][q];
      if (q >= 1 && p + 1 <= K - 1 && q - 1 <= K - 1 - (p + 1)) v -= w.c[p + 1][q - 1];
      w.c[p][q] = v;
    }
  out.w = w;

  // Verify every coefficient equation of (z1+z2) W = F - Id.
  out.reconstruction_ok = out.antidiagonal_ok;
  for (int p = 0; p <= K; ++p)
    for (int q = 0; p + q <= K; ++q) {
      if (p + q == 0) {
        if (!num.c[0][0].is_zero()) out.reconstruction_ok = false;
        continue;
      }
      Matrix<S> lhs(N, N);
      if (p >= 1 && p - 1 + q <= K - 1) lhs += w.c[p - 1][q];
      if (q >= 1 && p + q - 1 <= K - 1) lhs += w.c[p][q - 1];
      if (!matrices_equal(lhs, num.c[p][q])) out.reconstruction_ok = false;
    }
  return out;
}

}  // namespace cohft
