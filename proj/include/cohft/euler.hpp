#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cohft/correlator.hpp"
#include "cohft/frobenius.hpp"
#include "cohft/nodal.hpp"
#include "cohft/series.hpp"

namespace cohft {

// Grading data at a semi-simple point: constant Euler part xi0, grading
// operator mu, conformal dimension d, all in the user basis.
template <class S>
struct EulerData {
  std::vector<S> xi0;
  Matrix<S> mu;
  Rational d = Rational(0);
};

template <class S>
std::vector<std::string> validate_euler(const FrobeniusAlgebra<S>& alg, const EulerData<S>& data) {
  std::vector<std::string> errs;
  int n = alg.rank();
  if (static_cast<int>(data.xi0.size()) != n || data.mu.rows() != n || data.mu.cols() != n) {
    errs.push_back("shape mismatch between algebra and Euler data");
    return errs;
  }
  S half_d = ScalarOps<S>::from_rational(data.d / Rational(2));
  std::vector<S> m1 = data.mu.apply(alg.unit);
  for (int i = 0; i < n; ++i) {
    if (!ScalarOps<S>::is_zero(m1[static_cast<size_t>(i)] +
                               half_d * alg.unit[static_cast<size_t>(i)])) {
      errs.push_back("mu does not scale the unit by -d/2");
      break;
    }
  }
  // beta pairs complementary mu-weights, so mu itself is beta-skew; in the
  // orthonormal frame this is plain skew-symmetry of the conjugated operator.
  Matrix<S> skew = data.mu.transpose() * alg.pairing + alg.pairing * data.mu;
  if (!skew.is_zero()) errs.push_back("mu is not beta-skew");
  return errs;
}

// Eigenvalues of Euler multiplication and the conjugated grading operator in
// the normalized idempotent frame.
template <class S>
struct CanonicalFrame {
  std::vector<S> u;
  Matrix<S> mu_bar;
  Matrix<S> pi;
  Matrix<S> pi_inv;
};

template <class S>
CanonicalFrame<S> canonical_euler_frame(const Frame<S>& frame, const EulerData<S>& data) {
  if (!frame.has_sqrt)
    throw std::invalid_argument("canonical frame needs square roots of the thetas");
  CanonicalFrame<S> cf;
  cf.u = frame_coordinates(frame, data.xi0);
  cf.pi = frame.pi;
  cf.pi_inv = frame.pi.inverse();
  cf.mu_bar = cf.pi_inv * data.mu * cf.pi;
  return cf;
}

template <class S>
struct RMatrixResult {
  bool ok = false;
  std::string error;
  EndSeries<S> e;  // canonical frame coordinates
  CanonicalFrame<S> cf;
};

// Homogeneity recursion [(xi0*), E_{k+1}] = -(mu+k) E_k in the canonical
// frame. Off-diagonal entries (across eigenvalue blocks) come from the
// commutator; entries within a block are fixed by the next step's
// consistency condition, which requires the in-block part of
// (mu_bar + k) E_k to vanish.
template <class S>
RMatrixResult<S> solve_rmatrix(const Frame<S>& frame, const EulerData<S>& data, int order) {
  RMatrixResult<S> res;
  res.cf = canonical_euler_frame(frame, data);
  int n = static_cast<int>(res.cf.u.size());

  std::vector<int> block(static_cast<size_t>(n), -1);
  int nblocks = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (ScalarOps<S>::is_zero(res.cf.u[static_cast<size_t>(i)] -
                                res.cf.u[static_cast<size_t>(j)])) {
        block[static_cast<size_t>(i)] = block[static_cast<size_t>(j)];
        break;
      }
    }
    if (block[static_cast<size_t>(i)] < 0) block[static_cast<size_t>(i)] = nblocks++;
  }

  res.e = EndSeries<S>::identity(order, n);
  for (int k = 0; k < order; ++k) {
    Matrix<S> r = res.cf.mu_bar * res.e.c[static_cast<size_t>(k)] +
                  res.e.c[static_cast<size_t>(k)].scaled(ScalarOps<S>::from_long(k));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (block[static_cast<size_t>(i)] != block[static_cast<size_t>(j)]) continue;
        if (!ScalarOps<S>::is_zero(r(i, j))) {
          res.error = "grading constraint violated in eigenvalue block " +
                      std::to_string(block[static_cast<size_t>(i)]) + " at order " +
                      std::to_string(k);
          return res;
        }
      }
    }
    Matrix<S> next(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (block[static_cast<size_t>(i)] == block[static_cast<size_t>(j)]) continue;
        next(i, j) = (ScalarOps<S>::zero() - r(i, j)) /
                     (res.cf.u[static_cast<size_t>(i)] - res.cf.u[static_cast<size_t>(j)]);
      }
    // In-block entries; mu_bar is zero there, so only the entries already
    // computed feed in.
    Matrix<S> mn = res.cf.mu_bar * next;
    S kp1 = ScalarOps<S>::from_long(k + 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (block[static_cast<size_t>(i)] != block[static_cast<size_t>(j)]) continue;
        next(i, j) = (ScalarOps<S>::zero() - mn(i, j)) / kp1;
      }
    res.e.c[static_cast<size_t>(k + 1)] = next;
  }
  res.ok = true;
  return res;
}

// Right multiplication by the scalar series exp(sum h_{2j-1} z^{2j-1});
// h_odd[j] holds h_{2j+1}.
template <class S>
EndSeries<S> hodge_ambiguity_apply(const EndSeries<S>& e, const std::vector<S>& h_odd) {
  std::vector<S> x(static_cast<size_t>(e.K) + 1, ScalarOps<S>::zero());
  for (size_t j = 0; j < h_odd.size(); ++j) {
    size_t deg = 2 * j + 1;
    if (deg <= static_cast<size_t>(e.K)) x[deg] = h_odd[j];
  }
  std::vector<S> s = scalar_series_exp(x);
  EndSeries<S> out(e.K, e.N);
  for (int k = 0; k <= e.K; ++k)
    for (int m = 0; m <= k; ++m)
      out.c[static_cast<size_t>(k)] +=
          e.c[static_cast<size_t>(k - m)].scaled(s[static_cast<size_t>(m)]);
  return out;
}

// Multilinear extension of a frame-basis table to arbitrary insertion
// vectors: to_frame's column b holds the frame coordinates of the b-th user
// basis vector.
template <class S>
S user_basis_entry(const CorrelatorTable<S>& t, const Matrix<S>& to_frame, int g,
                   const std::vector<std::pair<int, int>>& user_slots) {
  int dim = t.dim();
  int n = static_cast<int>(user_slots.size());
  S acc = ScalarOps<S>::zero();
  std::vector<std::pair<int, int>> slots(user_slots.size());
  std::function<void(int, S)> rec = [&](int pos, S coeff) {
    if (pos == n) {
      acc += coeff * t.lookup(g, slots);
      return;
    }
    for (int i = 0; i < dim; ++i) {
      const S& c = to_frame(i, user_slots[static_cast<size_t>(pos)].first);
      if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(c)) continue;
      slots[static_cast<size_t>(pos)] = {i, user_slots[static_cast<size_t>(pos)].second};
      rec(pos + 1, coeff * c);
    }
  };
  rec(0, ScalarOps<S>::one());
  return acc;
}

struct HomogeneityReport {
  bool ok = true;
  bool basic_weights_ok = true;
  long checked = 0;
  long nonzero = 0;
  std::vector<std::string> violations;
};

// Weight bookkeeping on user-basis entries, for mu diagonal in the user
// basis with rational eigenvalues mu_weights. A nonzero entry must carry
// weight w = (g-1)d + sum_s (mu(b_s) + d/2 + a_s) - dim M, a nonnegative
// multiple of weight_step (the divisor pairing granularity); weight_step 0
// demands w = 0 exactly. Also confirms the unit and the Euler element are
// (mu + d/2)-eigenvectors of weight 0 and d.
template <class S>
HomogeneityReport check_homogeneity(const FrobeniusAlgebra<S>& alg, const Frame<S>& frame,
                                    const CorrelatorTable<S>& t, const EulerData<S>& data,
                                    const std::vector<Rational>& mu_weights, long weight_step) {
  HomogeneityReport rep;
  int dim = t.dim();
  if (static_cast<int>(mu_weights.size()) != dim)
    throw std::invalid_argument("homogeneity: mu weight count mismatch");

  S half_d = ScalarOps<S>::from_rational(data.d / Rational(2));
  std::vector<S> m1 = data.mu.apply(alg.unit);
  for (int i = 0; i < dim; ++i)
    if (!ScalarOps<S>::is_zero(m1[static_cast<size_t>(i)] +
                               half_d * alg.unit[static_cast<size_t>(i)]))
      rep.basic_weights_ok = false;
  std::vector<S> alpha = alg.euler_element();
  std::vector<S> ma = data.mu.apply(alpha);
  for (int i = 0; i < dim; ++i)
    if (!ScalarOps<S>::is_zero(ma[static_cast<size_t>(i)] -
                               half_d * alpha[static_cast<size_t>(i)]))
      rep.basic_weights_ok = false;

  Matrix<S> to_frame = frame.pi.inverse();
  for (int g = 0; g <= t.g_max; ++g) {
    for (int n = 0; n <= t.n_bound[static_cast<size_t>(g)]; ++n) {
      if (!moduli_stable(g, n)) continue;
      for_each_slot_multiset(
          dim, n, moduli_dim(g, n), [&](const std::vector<std::pair<int, int>>& key_slots) {
            S val = user_basis_entry(t, to_frame, g, key_slots);
            ++rep.checked;
            if (ScalarOps<S>::is_zero(val)) return;
            ++rep.nonzero;
            Rational w = Rational(g - 1) * data.d - Rational(moduli_dim(g, n));
            for (const auto& [b, a] : key_slots)
              w += mu_weights[static_cast<size_t>(b)] + data.d / Rational(2) + Rational(a);
            bool good;
            if (weight_step == 0) {
              good = w == 0;
            } else {
              good = w.get_den() == 1 && w >= 0 && w.get_num() % weight_step == 0;
            }
            if (!good) {
              rep.ok = false;
              if (rep.violations.size() < 8) {
                std::string desc = "g=" + std::to_string(g) + " slots";
                for (const auto& [b, a] : key_slots)
                  desc += " (" + std::to_string(b) + "," + std::to_string(a) + ")";
                desc += " weight " + rational_to_string(w);
                rep.violations.push_back(desc);
              }
            }
          });
    }
  }
  return rep;
}

// Match a freshly computed frame against a reference one: permute the
// idempotents to the nearest reference idempotent and pick the sqrt branch
// on the same side.
template <class S>
Frame<S> align_frame(const Frame<S>& ref, const Frame<S>& f) {
  int n = static_cast<int>(ref.idempotents.size());
  std::vector<int> perm(static_cast<size_t>(n), -1);
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    double best = -1;
    int bj = -1;
    for (int j = 0; j < n; ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      double dist = 0;
      for (int c = 0; c < n; ++c)
        dist += ScalarOps<S>::abs_double(ref.idempotents[static_cast<size_t>(i)][static_cast<size_t>(c)] -
                                         f.idempotents[static_cast<size_t>(j)][static_cast<size_t>(c)]);
      if (bj < 0 || dist < best) {
        best = dist;
        bj = j;
      }
    }
    perm[static_cast<size_t>(i)] = bj;
    used[static_cast<size_t>(bj)] = true;
  }
  Frame<S> out;
  out.has_sqrt = f.has_sqrt;
  out.idempotents.resize(static_cast<size_t>(n));
  out.thetas.resize(static_cast<size_t>(n));
  if (f.has_sqrt) out.sqrt_thetas.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    int j = perm[static_cast<size_t>(i)];
    out.idempotents[static_cast<size_t>(i)] = f.idempotents[static_cast<size_t>(j)];
    out.thetas[static_cast<size_t>(i)] = f.thetas[static_cast<size_t>(j)];
    if (f.has_sqrt) {
      S s = f.sqrt_thetas[static_cast<size_t>(j)];
      const S& r = ref.sqrt_thetas[static_cast<size_t>(i)];
      if (ScalarOps<S>::abs_double(s - r) > ScalarOps<S>::abs_double(s + r))
        s = ScalarOps<S>::zero() - s;
      out.sqrt_thetas[static_cast<size_t>(i)] = s;
    }
  }
  if (f.has_sqrt) {
    out.pi = Matrix<S>(n, n);
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < n; ++r)
        out.pi(r, i) = out.idempotents[static_cast<size_t>(i)][static_cast<size_t>(r)] /
                       out.sqrt_thetas[static_cast<size_t>(i)];
  }
  return out;
}

// Finite-difference check of the variation equation
// d_v(E Pi) Pi^{-1} = [(v*), E(z)/z] per z-order; returns the largest
// residual entry. The family maps a deformation parameter to the algebra at
// that point; Euler data stays fixed in the user basis.
template <class S>
double verify_ode_u(const std::function<FrobeniusAlgebra<S>(const S&)>& family,
                    const EulerData<S>& data, const std::vector<S>& v_direction, int order,
                    const S& eps) {
  FrobeniusAlgebra<S> alg0 = family(ScalarOps<S>::zero());
  FrobeniusAlgebra<S> alg1 = family(eps);
  FrameResult<S> f0 = alg0.idempotent_decomposition();
  FrameResult<S> f1 = alg1.idempotent_decomposition();
  if (!f0.ok || !f1.ok)
    throw std::runtime_error("ODE check hit a non-semi-simple point");
  if (!f0.frame.has_sqrt || !f1.frame.has_sqrt)
    throw std::runtime_error("ODE check needs sqrt branches");
  Frame<S> fr1 = align_frame(f0.frame, f1.frame);

  RMatrixResult<S> r0 = solve_rmatrix(f0.frame, data, order);
  RMatrixResult<S> r1 = solve_rmatrix(fr1, data, order);
  if (!r0.ok) throw std::runtime_error("R-matrix solve failed at base point: " + r0.error);
  if (!r1.ok) throw std::runtime_error("R-matrix solve failed at shifted point: " + r1.error);

  Matrix<S> pi0_inv = f0.frame.pi.inverse();
  Matrix<S> multv = alg0.mult_operator(v_direction);
  S inv_eps = ScalarOps<S>::one() / eps;
  double worst = 0;
  for (int k = 0; k < order; ++k) {
    Matrix<S> m1 = fr1.pi * r1.e.c[static_cast<size_t>(k)];
    Matrix<S> m0 = f0.frame.pi * r0.e.c[static_cast<size_t>(k)];
    Matrix<S> fd = (m1 - m0).scaled(inv_eps) * pi0_inv;
    Matrix<S> e_user = f0.frame.pi * r0.e.c[static_cast<size_t>(k + 1)] * pi0_inv;
    Matrix<S> resid = fd - (multv * e_user - e_user * multv);
    for (int r = 0; r < resid.rows(); ++r)
      for (int c = 0; c < resid.cols(); ++c)
        worst = std::max(worst, ScalarOps<S>::abs_double(resid(r, c)));
  }
  return worst;
}

template <class S>
struct ReconstructResult {
  RMatrixResult<S> rmatrix;
  Frame<S> frame;
  BuildResult<S> build;
};

// Theorem-2 pipeline: split the algebra into idempotents, solve the
// homogeneity recursion for E, optionally twist by the odd scalar
// ambiguity, then run the group-action build.
template <class S>
ReconstructResult<S> reconstruct_gw(const FrobeniusAlgebra<S>& alg, const EulerData<S>& data,
                                    int g_max, int n_max, const WkOracle& oracle,
                                    const std::vector<S>& h_odd = {}) {
  auto errs = validate_euler(alg, data);
  if (!errs.empty()) throw std::invalid_argument("Euler data invalid: " + errs.front());
  FrameResult<S> fr = alg.idempotent_decomposition();
  if (!fr.ok) throw std::invalid_argument("algebra is not split semi-simple: " + fr.error);
  if (!fr.frame.has_sqrt)
    throw std::invalid_argument("theta square roots missing over the scalar field");

  int dmax = 0;
  for (int g = 0; g <= g_max; ++g) {
    int bstar = n_max + 2 * (g_max - g);
    dmax = std::max(dmax, 3 * g - 3 + 2 * bstar + 3 * g - 3);
  }
  dmax = std::max(dmax, 1);

  ReconstructResult<S> res;
  res.rmatrix = solve_rmatrix(fr.frame, data, dmax);
  if (!res.rmatrix.ok) throw std::invalid_argument("R-matrix: " + res.rmatrix.error);
  res.frame = fr.frame;
  EndSeries<S> e = res.rmatrix.e;
  if (!h_odd.empty()) e = hodge_ambiguity_apply(e, h_odd);
  res.build = build_cohft(fr.frame.sqrt_thetas, e, g_max, n_max, oracle);
  return res;
}

// Rational-count recursion for plane curves: N_1 = 1 and
// N_d = sum_{k+l=d} N_k N_l (k^2 l^2 C(3d-4,3k-2) - k^3 l C(3d-4,3k-1)).
inline std::vector<Rational> wdvv_genus0(int dmax) {
  std::vector<Rational> n(static_cast<size_t>(dmax) + 1, Rational(0));
  if (dmax >= 1) n[1] = Rational(1);
  for (int d = 2; d <= dmax; ++d) {
    Rational acc(0);
    for (int k = 1; k < d; ++k) {
      int l = d - k;
      Rational kk(k), ll(l);
      Rational term = kk * kk * ll * ll * binomial(3 * d - 4, 3 * k - 2) -
                      kk * kk * kk * ll * binomial(3 * d - 4, 3 * k - 1);
      acc += n[static_cast<size_t>(k)] * n[static_cast<size_t>(l)] * term;
    }
    n[static_cast<size_t>(d)] = acc;
  }
  return n;
}

}  // namespace cohft
