#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "cohft/eigen.hpp"
#include "cohft/matrix.hpp"
#include "cohft/scalar.hpp"

namespace cohft {

inline bool frame_scalar_less(const Rational& a, const Rational& b) { return a < b; }
inline bool frame_scalar_less(const Complex& a, const Complex& b) {
  if (a.re != b.re) return a.re < b.re;
  return a.im < b.im;
}

// Orthogonal idempotent basis of a semisimple algebra, in working-basis
// coordinates. sqrt_thetas and pi are only populated when every theta has a
// square root in the scalar field.
template <class S>
struct Frame {
  std::vector<std::vector<S>> idempotents;
  std::vector<S> thetas;
  bool has_sqrt = false;
  std::vector<S> sqrt_thetas;
  Matrix<S> pi;  // columns p_i / sqrt(theta_i); satisfies pi^T B pi = Id
};

template <class S>
struct FrameResult {
  bool ok = false;
  std::string error;
  Frame<S> frame;
};

// x = sum c_i p_i in the idempotent basis; returns c. Works without square
// roots.
template <class S>
std::vector<S> frame_coordinates(const Frame<S>& f, const std::vector<S>& x) {
  int n = static_cast<int>(f.idempotents.size());
  Matrix<S> p(n, n);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      p(r, i) = f.idempotents[static_cast<size_t>(i)][static_cast<size_t>(r)];
  return p.solve(x);
}

// Commutative Frobenius algebra given by structure constants in a chosen
// basis: e_i e_j = sum_k structure[k](i,j) e_k, pairing(i,j) = beta(e_i, e_j),
// unit = coordinates of the identity element.
template <class S>
class FrobeniusAlgebra {
 public:
  std::vector<Matrix<S>> structure;
  Matrix<S> pairing;
  std::vector<S> unit;

  int rank() const { return static_cast<int>(unit.size()); }

  // Basis of orthogonal idempotents with prescribed theta values.
  static FrobeniusAlgebra semisimple_diagonal(const std::vector<S>& thetas) {
    int n = static_cast<int>(thetas.size());
    FrobeniusAlgebra a;
    a.structure.assign(n, Matrix<S>(n, n));
    a.pairing = Matrix<S>(n, n);
    a.unit.assign(n, ScalarOps<S>::one());
    for (int k = 0; k < n; ++k) {
      a.structure[k](k, k) = ScalarOps<S>::one();
      a.pairing(k, k) = thetas[k];
    }
    return a;
  }

  // Orthonormal frame basis e_i = p_i / sqrt(theta_i): pairing is the
  // identity and e_i e_j = delta_ij e_i / sqrt(theta_i).
  static FrobeniusAlgebra orthonormal_frame(const std::vector<S>& sqrt_thetas) {
    int n = static_cast<int>(sqrt_thetas.size());
    FrobeniusAlgebra a;
    a.structure.assign(n, Matrix<S>(n, n));
    a.pairing = Matrix<S>::identity(n);
    a.unit = sqrt_thetas;
    for (int k = 0; k < n; ++k)
      a.structure[k](k, k) = ScalarOps<S>::one() / sqrt_thetas[k];
    return a;
  }

  std::vector<S> basis_vector(int j) const {
    std::vector<S> v(rank(), ScalarOps<S>::zero());
    v[static_cast<size_t>(j)] = ScalarOps<S>::one();
    return v;
  }

  std::vector<S> multiply(const std::vector<S>& x, const std::vector<S>& y) const {
    int n = rank();
    std::vector<S> z(n, ScalarOps<S>::zero());
    for (int i = 0; i < n; ++i) {
      if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(x[i])) continue;
      for (int j = 0; j < n; ++j) {
        if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(y[j])) continue;
        for (int k = 0; k < n; ++k) z[k] += x[i] * y[j] * structure[k](i, j);
      }
    }
    return z;
  }

  S beta(const std::vector<S>& x, const std::vector<S>& y) const {
    int n = rank();
    S acc = ScalarOps<S>::zero();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += x[i] * pairing(i, j) * y[j];
    return acc;
  }

  // theta(x) = beta(x, 1), the counit.
  S theta_of(const std::vector<S>& x) const { return beta(x, unit); }

  // Matrix of multiplication by x: column j holds x * e_j.
  Matrix<S> mult_operator(const std::vector<S>& x) const {
    int n = rank();
    Matrix<S> m(n, n);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        S acc = ScalarOps<S>::zero();
        for (int i = 0; i < n; ++i) acc += x[i] * structure[k](i, j);
        m(k, j) = acc;
      }
    return m;
  }

  Matrix<S> beta_inverse() const { return pairing.inverse(); }

  // beta-adjoint of an operator.
  Matrix<S> adjoint(const Matrix<S>& m) const {
    return beta_inverse() * m.transpose() * pairing;
  }

  // Empty result means the data is a genuine commutative Frobenius algebra.
  std::vector<std::string> validate() const {
    std::vector<std::string> bad;
    int n = rank();
    if (static_cast<int>(structure.size()) != n) {
      bad.push_back("structure constants have wrong rank");
      return bad;
    }
    for (const auto& m : structure)
      if (m.rows() != n || m.cols() != n) {
        bad.push_back("structure constant matrix has wrong shape");
        return bad;
      }
    if (pairing.rows() != n || pairing.cols() != n) {
      bad.push_back("pairing matrix has wrong shape");
      return bad;
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!ScalarOps<S>::is_zero(pairing(i, j) - pairing(j, i))) {
          bad.push_back("pairing is not symmetric");
          i = n;
          break;
        }
    try {
      pairing.inverse();
    } catch (const SingularMatrix&) {
      bad.push_back("pairing is degenerate");
    }
    bool comm_ok = true;
    for (int k = 0; k < n && comm_ok; ++k)
      for (int i = 0; i < n && comm_ok; ++i)
        for (int j = i + 1; j < n; ++j)
          if (!ScalarOps<S>::is_zero(structure[k](i, j) - structure[k](j, i))) {
            bad.push_back("product is not commutative");
            comm_ok = false;
            break;
          }
    bool unit_ok = true;
    for (int j = 0; j < n && unit_ok; ++j) {
      std::vector<S> p = multiply(unit, basis_vector(j));
      for (int k = 0; k < n; ++k) {
        S want = k == j ? ScalarOps<S>::one() : ScalarOps<S>::zero();
        if (!ScalarOps<S>::is_zero(p[k] - want)) {
          bad.push_back("unit element does not act as identity");
          unit_ok = false;
          break;
        }
      }
    }
    bool assoc_ok = true;
    for (int i = 0; i < n && assoc_ok; ++i)
      for (int j = 0; j < n && assoc_ok; ++j)
        for (int l = 0; l < n && assoc_ok; ++l) {
          std::vector<S> left =
              multiply(multiply(basis_vector(i), basis_vector(j)), basis_vector(l));
          std::vector<S> right =
              multiply(basis_vector(i), multiply(basis_vector(j), basis_vector(l)));
          for (int k = 0; k < n; ++k)
            if (!ScalarOps<S>::is_zero(left[k] - right[k])) {
              bad.push_back("product is not associative");
              assoc_ok = false;
              break;
            }
        }
    bool inv_ok = true;
    for (int i = 0; i < n && inv_ok; ++i)
      for (int j = 0; j < n && inv_ok; ++j)
        for (int l = 0; l < n && inv_ok; ++l) {
          S a = ScalarOps<S>::zero();
          S b = ScalarOps<S>::zero();
          for (int k = 0; k < n; ++k) {
            a += structure[k](i, j) * pairing(k, l);
            b += structure[k](j, l) * pairing(k, i);
          }
          if (!ScalarOps<S>::is_zero(a - b)) {
            bad.push_back("pairing is not invariant under the product");
            inv_ok = false;
          }
        }
    return bad;
  }

  // Gram matrix of the regular-representation trace form tr(L_a L_b).
  Matrix<S> trace_form() const {
    int n = rank();
    std::vector<Matrix<S>> ops;
    ops.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ops.push_back(mult_operator(basis_vector(i)));
    Matrix<S> t(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        t(i, j) = (ops[static_cast<size_t>(i)] * ops[static_cast<size_t>(j)]).trace();
        t(j, i) = t(i, j);
      }
    return t;
  }

  bool is_semisimple() const { return !ScalarOps<S>::is_zero(trace_form().det()); }

  // The element alpha with beta(alpha, x) = tr(L_x); equals sum theta_i^{-1} p_i
  // in the semisimple case but is defined whenever the pairing is invertible.
  std::vector<S> euler_element() const {
    int n = rank();
    std::vector<S> rhs(n, ScalarOps<S>::zero());
    for (int k = 0; k < n; ++k) rhs[static_cast<size_t>(k)] = mult_operator(basis_vector(k)).trace();
    return pairing.solve(rhs);
  }

  FrameResult<S> idempotent_decomposition() const {
    FrameResult<S> res;
    int n = rank();
    for (int attempt = 0; attempt < 12; ++attempt) {
      std::vector<S> probe(n);
      for (int k = 0; k < n; ++k) {
        long v = attempt == 0 ? k + 1
                              : 1 + static_cast<long>((1103515245ull * (attempt + 1) + 12345ull * k) % 19ull);
        probe[static_cast<size_t>(k)] = ScalarOps<S>::from_long(v);
      }
      Matrix<S> lx = mult_operator(probe);
      auto lam = EigenSolve<S>::eigenvalues(lx);
      if (!lam) continue;
      bool distinct = true;
      for (size_t i = 0; i < lam->size() && distinct; ++i)
        for (size_t j = i + 1; j < lam->size(); ++j)
          if (ScalarOps<S>::is_zero((*lam)[i] - (*lam)[j])) {
            distinct = false;
            break;
          }
      if (!distinct) continue;
      // Lagrange projector onto each eigenline, applied to the unit.
      std::vector<std::vector<S>> idem;
      for (int i = 0; i < n; ++i) {
        std::vector<S> v = unit;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          std::vector<S> w = lx.apply(v);
          S d = (*lam)[static_cast<size_t>(i)] - (*lam)[static_cast<size_t>(j)];
          for (int k = 0; k < n; ++k)
            v[static_cast<size_t>(k)] =
                (w[static_cast<size_t>(k)] - (*lam)[static_cast<size_t>(j)] * v[static_cast<size_t>(k)]) / d;
        }
        idem.push_back(std::move(v));
      }
      if (!check_idempotents(idem)) continue;
      std::sort(idem.begin(), idem.end(), [](const std::vector<S>& a, const std::vector<S>& b) {
        for (size_t k = 0; k < a.size(); ++k) {
          if (!ScalarOps<S>::is_zero(a[k] - b[k])) return frame_scalar_less(a[k], b[k]);
        }
        return false;
      });
      res.frame.idempotents = idem;
      res.frame.thetas.clear();
      bool theta_ok = true;
      for (const auto& p : idem) {
        S t = theta_of(p);
        if (ScalarOps<S>::is_zero(t)) theta_ok = false;
        res.frame.thetas.push_back(t);
      }
      if (!theta_ok) {
        res.error = "an idempotent has vanishing counit";
        return res;
      }
      res.frame.sqrt_thetas.clear();
      res.frame.has_sqrt = true;
      for (const auto& t : res.frame.thetas) {
        S r;
        if (!ScalarOps<S>::sqrt(t, r)) {
          res.frame.has_sqrt = false;
          break;
        }
        res.frame.sqrt_thetas.push_back(r);
      }
      if (res.frame.has_sqrt) {
        res.frame.pi = Matrix<S>(n, n);
        for (int i = 0; i < n; ++i)
          for (int r = 0; r < n; ++r)
            res.frame.pi(r, i) =
                res.frame.idempotents[static_cast<size_t>(i)][static_cast<size_t>(r)] /
                res.frame.sqrt_thetas[static_cast<size_t>(i)];
      } else {
        res.frame.sqrt_thetas.clear();
      }
      res.ok = true;
      return res;
    }
    if (!is_semisimple())
      res.error = "algebra is not semisimple: trace form is degenerate";
    else
      res.error = "no separating element split over the scalar field";
    return res;
  }

  // x = sum c_i p_i; returns c. Works without square roots.
  std::vector<S> frame_coordinates(const Frame<S>& f, const std::vector<S>& x) const {
    return cohft::frame_coordinates(f, x);
  }

 private:
  bool check_idempotents(const std::vector<std::vector<S>>& idem) const {
    int n = rank();
    std::vector<S> total(n, ScalarOps<S>::zero());
    for (const auto& p : idem)
      for (int k = 0; k < n; ++k) total[static_cast<size_t>(k)] += p[static_cast<size_t>(k)];
    for (int k = 0; k < n; ++k)
      if (!ScalarOps<S>::is_zero(total[static_cast<size_t>(k)] - unit[static_cast<size_t>(k)])) return false;
    for (size_t i = 0; i < idem.size(); ++i)
      for (size_t j = i; j < idem.size(); ++j) {
        std::vector<S> prod = multiply(idem[i], idem[j]);
        for (int k = 0; k < n; ++k) {
          S want = i == j ? idem[i][static_cast<size_t>(k)] : ScalarOps<S>::zero();
          if (!ScalarOps<S>::is_zero(prod[static_cast<size_t>(k)] - want)) return false;
        }
      }
    return true;
  }
};

}  // namespace cohft
