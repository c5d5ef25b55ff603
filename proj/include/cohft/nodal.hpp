#pragma once

#include <vector>

#include "cohft/frobenius.hpp"
#include "cohft/series.hpp"

namespace cohft {

// Coefficient-wise beta-adjoint of an operator series.
template <class S>
EndSeries<S> adjoint_series(const FrobeniusAlgebra<S>& alg, const EndSeries<S>& e) {
  EndSeries<S> out(e.K, e.N);
  Matrix<S> binv = alg.beta_inverse();
  for (int k = 0; k <= e.K; ++k) out.c[k] = binv * e.c[k].transpose() * alg.pairing;
  return out;
}

template <class S>
BiSeries<S> bs_adjoint(const FrobeniusAlgebra<S>& alg, const BiSeries<S>& b) {
  BiSeries<S> out(b.K, b.N);
  Matrix<S> binv = alg.beta_inverse();
  for (int p = 0; p <= b.K; ++p)
    for (int q = 0; p + q <= b.K; ++q) out.c[p][q] = binv * b.c[p][q].transpose() * alg.pairing;
  return out;
}

template <class S>
bool es_equal(const EndSeries<S>& a, const EndSeries<S>& b) {
  if (a.K != b.K || a.N != b.N) return false;
  for (int k = 0; k <= a.K; ++k)
    if (!matrices_equal(a.c[k], b.c[k])) return false;
  return true;
}

// E(z) * E^adj(-z) = Id to truncation order.
template <class S>
bool check_symplectic(const FrobeniusAlgebra<S>& alg, const EndSeries<S>& e) {
  return es_is_identity(es_mul(e, es_alternate(adjoint_series(alg, e))));
}

template <class S>
struct BilinearForm {
  BiSeries<S> series;
  bool symmetric = false;  // series(z2,z1) equals series(z1,z2)^adj
};

// Pairing-side form attached to (E, D).
template <class S>
BilinearForm<S> B_from_ED(const FrobeniusAlgebra<S>& alg, const EndSeries<S>& e,
                          const BiSeries<S>& d) {
  EndSeries<S> einv = es_inverse(e);
  EndSeries<S> left = es_mul(adjoint_series(alg, es_alternate(einv)), einv);
  BilinearForm<S> out;
  out.series = bs_mul_left_z1(left, d);
  out.symmetric = bs_equal(bs_swap_vars(out.series), bs_adjoint(alg, out.series));
  return out;
}

// Copairing-side form attached to (E, D).
template <class S>
BiSeries<S> C_from_ED(const FrobeniusAlgebra<S>& alg, const EndSeries<S>& e,
                      const BiSeries<S>& d) {
  EndSeries<S> right = es_mul(es_alternate(e), adjoint_series(alg, e));
  return bs_mul_right_z1(bs_swap_vars(d), right);
}

template <class S>
struct FourWayReport {
  EndSeries<S> from_e;      // E^{-1}(-z)^adj E^{-1}(z)
  EndSeries<S> from_d;      // D^adj(0,z) D^{-1}(z,0)
  EndSeries<S> from_b;      // B'(z,-z)
  EndSeries<S> from_c_inv;  // C'(-z,z)^{-1}
  bool ok = false;
};

// The one-variable chain that ties E, D, B', C' together; all four series must
// agree when (E, D) is admissible (D identity on the anti-diagonal and B'
// symmetric).
template <class S>
FourWayReport<S> consistency_4way(const FrobeniusAlgebra<S>& alg, const EndSeries<S>& e,
                                  const BiSeries<S>& d, const BiSeries<S>& b,
                                  const BiSeries<S>& c) {
  FourWayReport<S> rep;
  EndSeries<S> einv = es_inverse(e);
  rep.from_e = es_mul(adjoint_series(alg, es_alternate(einv)), einv);
  rep.from_d = es_mul(bs_slice_z2(bs_adjoint(alg, d)), es_inverse(bs_slice_z1(d)));
  rep.from_b = bs_antidiagonal(b);
  rep.from_c_inv = es_inverse(bs_antidiagonal(bs_swap_vars(c)));
  rep.ok = es_equal(rep.from_e, rep.from_d) && es_equal(rep.from_e, rep.from_b) &&
           es_equal(rep.from_e, rep.from_c_inv);
  return rep;
}

template <class S>
struct NodalW {
  BiSeries<S> w;  // one order lower than E
  bool symplectic_ok = false;
  bool symmetric = false;  // w(z1,z2)^adj equals w(z2,z1)
};

// W with (z1+z2) W = E^{-1}(z2) E^{-1}(z1)^adj - Id; defined exactly when E is
// symplectic, which the divided difference detects via the anti-diagonal.
template <class S>
NodalW<S> W_from_E(const FrobeniusAlgebra<S>& alg, const EndSeries<S>& e) {
  EndSeries<S> einv = es_inverse(e);
  BiSeries<S> f = bs_product_z2_z1(einv, adjoint_series(alg, einv));
  DividedDifference<S> dd = divided_difference(f);
  NodalW<S> out;
  out.w = dd.w;
  out.symplectic_ok = dd.antidiagonal_ok && dd.reconstruction_ok;
  out.symmetric = bs_equal(bs_adjoint(alg, out.w), bs_swap_vars(out.w));
  return out;
}

template <class S>
struct ZetaData {
  VecSeries<S> zeta;                  // z*(E^{-1}(z)1 - 1), one order above E
  std::vector<std::vector<S>> a;      // a[j-1] = a_j in the user basis, j = 1..K
  VecSeries<S> theorem_form;          // z*exp(-sum a_j z^j) - z, rebuilt from a
};

// Dilaton-shift vector and the kappa exponents a_j with
// exp(-sum_{j>0} a_j z^j) = E^{-1}(z) 1, taken componentwise in the frame.
template <class S>
ZetaData<S> zeta_from_E(const FrobeniusAlgebra<S>& alg, const Frame<S>& frame,
                        const EndSeries<S>& e) {
  int n = alg.rank();
  int K = e.K;
  VecSeries<S> v = es_apply_vec(es_inverse(e), alg.unit);

  Matrix<S> p(n, n);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r) p(r, i) = frame.idempotents[static_cast<size_t>(i)][static_cast<size_t>(r)];
  Matrix<S> pinv = p.inverse();

  // Componentwise log in frame coordinates.
  std::vector<std::vector<S>> fc(static_cast<size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) fc[static_cast<size_t>(k)] = pinv.apply(v.c[static_cast<size_t>(k)]);
  std::vector<std::vector<S>> logs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<S> u(static_cast<size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) u[static_cast<size_t>(k)] = fc[static_cast<size_t>(k)][static_cast<size_t>(i)];
    logs[static_cast<size_t>(i)] = scalar_series_log(u);
  }

  ZetaData<S> out;
  out.a.assign(static_cast<size_t>(K), std::vector<S>(static_cast<size_t>(n), ScalarOps<S>::zero()));
  for (int j = 1; j <= K; ++j) {
    std::vector<S> frame_coords(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) frame_coords[static_cast<size_t>(i)] = -logs[static_cast<size_t>(i)][static_cast<size_t>(j)];
    out.a[static_cast<size_t>(j) - 1] = p.apply(frame_coords);
  }

  out.zeta = VecSeries<S>(K + 1, n);
  for (int k = 1; k <= K + 1; ++k) {
    std::vector<S> coef = v.c[static_cast<size_t>(k) - 1];
    if (k == 1)
      for (int r = 0; r < n; ++r) coef[static_cast<size_t>(r)] -= alg.unit[static_cast<size_t>(r)];
    out.zeta.c[static_cast<size_t>(k)] = coef;
  }

  // Rebuild from the a_j as a round-trip regression.
  out.theorem_form = VecSeries<S>(K + 1, n);
  std::vector<std::vector<S>> exps(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<S> arg(static_cast<size_t>(K) + 1, ScalarOps<S>::zero());
    for (int j = 1; j <= K; ++j) arg[static_cast<size_t>(j)] = logs[static_cast<size_t>(i)][static_cast<size_t>(j)];
    exps[static_cast<size_t>(i)] = scalar_series_exp(arg);
  }
  for (int k = 1; k <= K + 1; ++k) {
    std::vector<S> frame_coords(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) frame_coords[static_cast<size_t>(i)] = exps[static_cast<size_t>(i)][static_cast<size_t>(k) - 1];
    std::vector<S> coef = p.apply(frame_coords);
    if (k == 1)
      for (int r = 0; r < n; ++r) coef[static_cast<size_t>(r)] -= alg.unit[static_cast<size_t>(r)];
    out.theorem_form.c[static_cast<size_t>(k)] = coef;
  }
  return out;
}

}  // namespace cohft
