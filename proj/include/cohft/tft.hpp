#pragma once

#include <stdexcept>
#include <vector>

#include "cohft/frobenius.hpp"
#include "cohft/matrix.hpp"
#include "cohft/scalar.hpp"

namespace cohft {

struct SurfaceSignature {
  int g = 0;
  int m = 0;  // inputs
  int n = 0;  // outputs
  int chi() const { return 2 - 2 * g - m - n; }
};

// Linear map A^{tensor n_in} -> A^{tensor n_out}, possibly for a disconnected
// surface; components lists the connected pieces. Multi-indices flatten
// big-endian: slot 1 is the most significant digit.
template <class S>
struct TftOp {
  std::vector<SurfaceSignature> components;
  int dim = 0;
  int n_in = 0;
  int n_out = 0;
  Matrix<S> mat;

  bool connected() const { return components.size() == 1; }
};

template <class S>
class ClosedTft {
 public:
  explicit ClosedTft(FrobeniusAlgebra<S> algebra) : a_(std::move(algebra)) {
    int n = a_.rank();
    mult2_ = Matrix<S>(n, n * n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mult2_(k, i * n + j) = a_.structure[k](i, j);
    Matrix<S> binv = a_.beta_inverse();
    comult2_ = Matrix<S>(n * n, n);
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < n; ++k)
        for (int b = 0; b < n; ++b) {
          S acc = ScalarOps<S>::zero();
          for (int x = 0; x < n; ++x) acc += a_.structure[k](c, x) * binv(x, b);
          comult2_(k * n + b, c) = acc;
        }
    cap_ = Matrix<S>(1, n);
    for (int b = 0; b < n; ++b) {
      S acc = ScalarOps<S>::zero();
      for (int x = 0; x < n; ++x) acc += a_.pairing(b, x) * a_.unit[static_cast<size_t>(x)];
      cap_(0, b) = acc;
    }
    cocap_ = Matrix<S>(n, 1);
    for (int k = 0; k < n; ++k) cocap_(k, 0) = a_.unit[static_cast<size_t>(k)];
    handle_ = mult2_ * comult2_;
  }

  const FrobeniusAlgebra<S>& algebra() const { return a_; }

  // Multiplication by alpha^g.
  Matrix<S> handle_operator(int g) const {
    Matrix<S> r = Matrix<S>::identity(a_.rank());
    for (int t = 0; t < g; ++t) r = handle_ * r;
    return r;
  }

  // Connected propagator assembled from elementary pieces: a merge tree on the
  // inputs, g handles, a split tree to the outputs. Works for any Frobenius
  // algebra, semisimple or not.
  TftOp<S> propagator_composed(const SurfaceSignature& sig) const {
    check_sig(sig);
    Matrix<S> m = split_tree(sig.n) * handle_operator(sig.g) * merge_tree(sig.m);
    return {{sig}, a_.rank(), sig.m, sig.n, std::move(m)};
  }

  // Closed-form connected propagator from a semisimple frame: the rank-one
  // contribution of each idempotent, weighted by an integer power of theta, so
  // the user-basis matrix stays in the base field.
  TftOp<S> propagator(const Frame<S>& f, const SurfaceSignature& sig) const {
    check_sig(sig);
    int n = a_.rank();
    long e = 1 - sig.g - (sig.m + sig.n);
    Matrix<S> m(ipow_dim(sig.n), ipow_dim(sig.m));
    for (int i = 0; i < n; ++i) {
      const auto& p = f.idempotents[static_cast<size_t>(i)];
      std::vector<S> q(static_cast<size_t>(n), ScalarOps<S>::zero());
      for (int b = 0; b < n; ++b)
        for (int x = 0; x < n; ++x) q[static_cast<size_t>(b)] += a_.pairing(b, x) * p[static_cast<size_t>(x)];
      std::vector<S> out_t = tensor_power(p, sig.n);
      std::vector<S> in_t = tensor_power(q, sig.m);
      S w = scalar_ipow(f.thetas[static_cast<size_t>(i)], e);
      for (size_t r = 0; r < out_t.size(); ++r) {
        S rv = w * out_t[r];
        if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(rv)) continue;
        for (size_t c = 0; c < in_t.size(); ++c)
          m(static_cast<int>(r), static_cast<int>(c)) += rv * in_t[c];
      }
    }
    return {{sig}, n, sig.m, sig.n, std::move(m)};
  }

  S partition_function(int g) const {
    return propagator_composed({g, 0, 0}).mat(0, 0);
  }

  // Sew the last k outputs of a onto the first k inputs of b. Connected
  // pieces only; the result is connected of genus g'+g''+(k-1) when k >= 1.
  static TftOp<S> sew(const TftOp<S>& a, const TftOp<S>& b, int k) {
    if (!a.connected() || !b.connected())
      throw std::invalid_argument("sew: operands must be connected");
    if (k < 1 || k > a.n_out || k > b.n_in) throw std::invalid_argument("sew: arity mismatch");
    if (a.dim != b.dim) throw std::invalid_argument("sew: dimension mismatch");
    int dim = a.dim;
    Matrix<S> left = kron(identity_power(dim, a.n_out - k), b.mat);
    Matrix<S> right = kron(a.mat, identity_power(dim, b.n_in - k));
    SurfaceSignature sig{a.components[0].g + b.components[0].g + k - 1,
                         a.n_in + b.n_in - k, a.n_out + b.n_out - k};
    return {{sig}, dim, sig.m, sig.n, left * right};
  }

  // Glue the last output to the last input of the same connected operator:
  // partial trace, raising the genus by one.
  static TftOp<S> self_sew(const TftOp<S>& a) {
    if (!a.connected()) throw std::invalid_argument("self_sew: operand must be connected");
    if (a.n_in < 1 || a.n_out < 1) throw std::invalid_argument("self_sew: needs a boundary pair");
    int dim = a.dim;
    int rows = a.mat.rows() / dim;
    int cols = a.mat.cols() / dim;
    Matrix<S> m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        S acc = ScalarOps<S>::zero();
        for (int t = 0; t < dim; ++t) acc += a.mat(r * dim + t, c * dim + t);
        m(r, c) = acc;
      }
    SurfaceSignature sig{a.components[0].g + 1, a.n_in - 1, a.n_out - 1};
    return {{sig}, dim, sig.m, sig.n, std::move(m)};
  }

  // Disjoint union of surfaces: Kronecker product of the maps.
  static TftOp<S> tensor(const TftOp<S>& a, const TftOp<S>& b) {
    if (a.dim != b.dim) throw std::invalid_argument("tensor: dimension mismatch");
    std::vector<SurfaceSignature> comps = a.components;
    comps.insert(comps.end(), b.components.begin(), b.components.end());
    return {std::move(comps), a.dim, a.n_in + b.n_in, a.n_out + b.n_out, kron(a.mat, b.mat)};
  }

 private:
  static void check_sig(const SurfaceSignature& sig) {
    if (sig.g < 0 || sig.m < 0 || sig.n < 0)
      throw std::invalid_argument("signature fields must be nonnegative");
  }

  int ipow_dim(int t) const {
    int r = 1;
    for (int s = 0; s < t; ++s) r *= a_.rank();
    return r;
  }

  static Matrix<S> identity_power(int dim, int t) {
    int r = 1;
    for (int s = 0; s < t; ++s) r *= dim;
    return Matrix<S>::identity(r);
  }

  std::vector<S> tensor_power(const std::vector<S>& v, int t) const {
    std::vector<S> out{ScalarOps<S>::one()};
    for (int s = 0; s < t; ++s) {
      std::vector<S> next(out.size() * v.size(), ScalarOps<S>::zero());
      for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j) next[i * v.size() + j] = out[i] * v[j];
      out = std::move(next);
    }
    return out;
  }

  // A^{tensor m} -> A by repeated multiplication; m=0 inserts the unit.
  Matrix<S> merge_tree(int m) const {
    if (m == 0) return cocap_;
    Matrix<S> r = Matrix<S>::identity(a_.rank());
    for (int s = 2; s <= m; ++s) r = mult2_ * kron(r, Matrix<S>::identity(a_.rank()));
    return r;
  }

  // A -> A^{tensor n} by repeated comultiplication; n=0 applies the counit.
  Matrix<S> split_tree(int n) const {
    if (n == 0) return cap_;
    Matrix<S> r = Matrix<S>::identity(a_.rank());
    for (int s = 2; s <= n; ++s) r = kron(r, Matrix<S>::identity(a_.rank())) * comult2_;
    return r;
  }

  FrobeniusAlgebra<S> a_;
  Matrix<S> mult2_;    // N x N^2
  Matrix<S> comult2_;  // N^2 x N
  Matrix<S> cap_;      // 1 x N, the counit
  Matrix<S> cocap_;    // N x 1, the unit
  Matrix<S> handle_;   // N x N, multiplication by alpha
};

}  // namespace cohft
