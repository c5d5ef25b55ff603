#pragma once

#include <cassert>
#include <stdexcept>
#include <vector>

#include "cohft/scalar.hpp"

namespace cohft {

struct SingularMatrix : std::runtime_error {
  SingularMatrix() : std::runtime_error("singular matrix") {}
};

template <class S>
class Matrix {
 public:
  Matrix() : r_(0), c_(0) {}
  Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols, ScalarOps<S>::zero()) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = ScalarOps<S>::one();
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }

  S& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
  const S& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

  bool same_shape(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_; }

  Matrix& operator+=(const Matrix& o) {
    assert(same_shape(o));
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    assert(same_shape(o));
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

  Matrix operator*(const Matrix& o) const {
    if (c_ != o.r_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix out(r_, o.c_);
    for (int i = 0; i < r_; ++i)
      for (int k = 0; k < c_; ++k) {
        const S& v = (*this)(i, k);
        if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(v)) continue;
        for (int j = 0; j < o.c_; ++j) out(i, j) += v * o(k, j);
      }
    return out;
  }

  Matrix scaled(const S& s) const {
    Matrix out = *this;
    for (auto& v : out.a_) v *= s;
    return out;
  }

  Matrix operator-() const { return scaled(ScalarOps<S>::from_long(-1)); }

  Matrix transpose() const {
    Matrix out(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  std::vector<S> apply(const std::vector<S>& v) const {
    assert(static_cast<int>(v.size()) == c_);
    std::vector<S> out(r_, ScalarOps<S>::zero());
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  S trace() const {
    S t = ScalarOps<S>::zero();
    for (int i = 0; i < r_ && i < c_; ++i) t += (*this)(i, i);
    return t;
  }

  bool is_zero() const {
    for (const auto& v : a_)
      if (!ScalarOps<S>::is_zero(v)) return false;
    return true;
  }

  // Gauss-Jordan with best-pivot selection; throws SingularMatrix.
  Matrix inverse() const {
    if (r_ != c_) throw std::invalid_argument("inverse of non-square matrix");
    int n = r_;
    Matrix a = *this;
    Matrix inv = identity(n);
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      double best = 0.0;
      for (int i = col; i < n; ++i) {
        double sz = ScalarOps<S>::pivot_size(a(i, col));
        if (sz > best) { best = sz; piv = i; }
      }
      if (piv < 0) throw SingularMatrix();
      if (piv != col) { a.swap_rows(piv, col); inv.swap_rows(piv, col); }
      S d = a(col, col);
      for (int j = 0; j < n; ++j) { a(col, j) /= d; inv(col, j) /= d; }
      for (int i = 0; i < n; ++i) {
        if (i == col) continue;
        S f = a(i, col);
        if (ScalarOps<S>::is_zero(f)) continue;
        for (int j = 0; j < n; ++j) {
          a(i, j) -= f * a(col, j);
          inv(i, j) -= f * inv(col, j);
        }
      }
    }
    return inv;
  }

  S det() const {
    if (r_ != c_) throw std::invalid_argument("det of non-square matrix");
    int n = r_;
    Matrix a = *this;
    S d = ScalarOps<S>::one();
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      double best = 0.0;
      for (int i = col; i < n; ++i) {
        double sz = ScalarOps<S>::pivot_size(a(i, col));
        if (sz > best) { best = sz; piv = i; }
      }
      if (piv < 0) return ScalarOps<S>::zero();
      if (piv != col) { a.swap_rows(piv, col); d = -d; }
      d *= a(col, col);
      S p = a(col, col);
      for (int i = col + 1; i < n; ++i) {
        S f = a(i, col) / p;
        if (ScalarOps<S>::is_zero(f)) continue;
        for (int j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      }
    }
    return d;
  }

  std::vector<S> solve(const std::vector<S>& rhs) const {
    Matrix inv = inverse();
    return inv.apply(rhs);
  }

  // Characteristic polynomial det(tI - M) by the Faddeev-LeVerrier scheme.
  // Returned coefficients are ordered constant-first, leading coefficient 1.
  std::vector<S> charpoly() const {
    if (r_ != c_) throw std::invalid_argument("charpoly of non-square matrix");
    int n = r_;
    std::vector<S> c(static_cast<size_t>(n) + 1, ScalarOps<S>::zero());
    c[n] = ScalarOps<S>::one();
    Matrix m(n, n);
    for (int k = 1; k <= n; ++k) {
      m = (*this) * m;
      for (int i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
      S t = ((*this) * m).trace();
      c[n - k] = -(t / ScalarOps<S>::from_long(k));
    }
    return c;
  }

  void swap_rows(int i, int j) {
    for (int k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
  }

 private:
  int r_, c_;
  std::vector<S> a_;
};

// Kronecker product, big-endian flattening: row (ia, ib) -> ia * b.rows() + ib.
template <class S>
Matrix<S> kron(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int ia = 0; ia < a.rows(); ++ia)
    for (int ja = 0; ja < a.cols(); ++ja) {
      const S& v = a(ia, ja);
      if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(v)) continue;
      for (int ib = 0; ib < b.rows(); ++ib)
        for (int jb = 0; jb < b.cols(); ++jb)
          out(ia * b.rows() + ib, ja * b.cols() + jb) = v * b(ib, jb);
    }
  return out;
}

template <class S>
bool matrices_equal(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (!ScalarOps<S>::is_zero(a(i, j) - b(i, j))) return false;
  return true;
}

}  // namespace cohft
