#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cohft/frobenius.hpp"
#include "cohft/intersect.hpp"
#include "cohft/nodal.hpp"
#include "cohft/scalar.hpp"
#include "cohft/series.hpp"

namespace cohft {

struct TableBounds : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One integrated correlator: genus plus the multiset of (frame index, psi
// power) insertion slots, kept sorted.
struct TableKey {
  int g = 0;
  std::vector<std::pair<int, int>> slots;

  friend bool operator<(const TableKey& a, const TableKey& b) {
    if (a.g != b.g) return a.g < b.g;
    return a.slots < b.slots;
  }
  friend bool operator==(const TableKey& a, const TableKey& b) {
    return a.g == b.g && a.slots == b.slots;
  }
};

// Finite theory table in the orthonormal frame basis (pairing = Id there).
// Entries are stored sparsely; absent means zero. n_bound[g] is the number of
// insertions the table is valid for at genus g; lookups beyond that throw.
template <class S>
struct CorrelatorTable {
  std::vector<S> sqrt_thetas;
  int g_max = 0;
  std::vector<int> n_bound;
  std::map<TableKey, S> entries;

  int dim() const { return static_cast<int>(sqrt_thetas.size()); }

  bool in_bounds(int g, int n) const {
    return g >= 0 && g <= g_max && n <= n_bound[static_cast<size_t>(g)];
  }

  void set(TableKey key, S value) {
    std::sort(key.slots.begin(), key.slots.end());
    if (!ScalarOps<S>::is_zero(value)) entries[std::move(key)] = std::move(value);
  }

  S lookup(int g, std::vector<std::pair<int, int>> slots) const {
    int n = static_cast<int>(slots.size());
    if (!moduli_stable(g, n)) return ScalarOps<S>::zero();
    long sum = 0;
    for (const auto& s : slots) sum += s.second;
    if (sum > moduli_dim(g, n)) return ScalarOps<S>::zero();
    if (!in_bounds(g, n))
      throw TableBounds("table bounds exceeded at (g=" + std::to_string(g) +
                        ", n=" + std::to_string(n) + ")");
    std::sort(slots.begin(), slots.end());
    auto it = entries.find(TableKey{g, std::move(slots)});
    return it == entries.end() ? ScalarOps<S>::zero() : it->second;
  }

  // Entries restricted to smaller bounds.
  CorrelatorTable restrict_bounds(int new_g_max, const std::vector<int>& new_n_bound) const {
    CorrelatorTable out;
    out.sqrt_thetas = sqrt_thetas;
    out.g_max = new_g_max;
    out.n_bound = new_n_bound;
    for (const auto& [key, val] : entries)
      if (out.in_bounds(key.g, static_cast<int>(key.slots.size()))) out.entries.emplace(key, val);
    return out;
  }

  void add_scaled(const CorrelatorTable& src, const S& c) {
    for (const auto& [key, val] : src.entries) {
      auto it = entries.find(key);
      if (it == entries.end()) {
        S v = val * c;
        if (!ScalarOps<S>::is_zero(v)) entries.emplace(key, std::move(v));
      } else {
        it->second += val * c;
        if (ScalarOps<S>::is_zero(it->second)) entries.erase(it);
      }
    }
  }

  bool empty_entries() const {
    for (const auto& [key, val] : entries)
      if (!ScalarOps<S>::is_zero(val)) return false;
    return true;
  }
};

inline std::vector<int> rectangular_bounds(int g_max, int n_max) {
  return std::vector<int>(static_cast<size_t>(g_max) + 1, n_max);
}

// Visit every canonical slot multiset of given size with total psi power
// bounded by smax.
template <class F>
void for_each_slot_multiset(int dim, int n, int smax, F&& visit) {
  std::vector<std::pair<int, int>> cur;
  std::function<void(int, int, int)> rec = [&](int min_i, int min_a, int rem) {
    if (static_cast<int>(cur.size()) == n) {
      visit(cur);
      return;
    }
    for (int i = min_i; i < dim; ++i) {
      int a0 = i == min_i ? min_a : 0;
      for (int a = a0; a <= rem; ++a) {
        cur.emplace_back(i, a);
        rec(i, a, rem - a);
        cur.pop_back();
      }
    }
  };
  rec(0, 0, smax);
}

inline void partitions_desc(int total, int slots, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int rem, int max_part) {
    if (static_cast<int>(cur.size()) == slots) {
      if (rem == 0) out.push_back(cur);
      return;
    }
    int bound = std::min(rem, max_part);
    for (int v = bound; v >= 0; --v) {
      cur.push_back(v);
      rec(rem - v, v);
      cur.pop_back();
    }
  };
  rec(total, total);
}

// Deligne-Mumford coupling of the frame algebra: insertions along a single
// idempotent direction weigh theta^{(2-2g-n)/2} times a psi intersection
// number; mixed insertions vanish.
template <class S>
CorrelatorTable<S> trivial_theory(const std::vector<S>& sqrt_thetas, int g_max,
                                  std::vector<int> n_bound, const WkOracle& oracle) {
  CorrelatorTable<S> t;
  t.sqrt_thetas = sqrt_thetas;
  t.g_max = g_max;
  t.n_bound = std::move(n_bound);
  int dim = t.dim();
  for (int g = 0; g <= g_max; ++g) {
    for (int n = 0; n <= t.n_bound[static_cast<size_t>(g)]; ++n) {
      if (!moduli_stable(g, n)) continue;
      int d = moduli_dim(g, n);
      std::vector<std::vector<int>> parts;
      partitions_desc(d, n, parts);
      for (const auto& p : parts) {
        Rational wk = oracle.value(g, p);
        if (wk == 0) continue;
        for (int i = 0; i < dim; ++i) {
          S v = scalar_ipow(sqrt_thetas[static_cast<size_t>(i)], 2 - 2 * g - n) *
                ScalarOps<S>::from_rational(wk);
          TableKey key;
          key.g = g;
          for (int a : p) key.slots.emplace_back(i, a);
          t.set(std::move(key), std::move(v));
        }
      }
    }
  }
  return t;
}

// Translation by a(z), a vector-valued series with no constant or linear
// part. Output bounds shrink: each output point can absorb up to 3g-3+n
// extra insertions. Coefficients of a beyond its stored order are zero.
template <class S>
CorrelatorTable<S> translate(const CorrelatorTable<S>& t, const VecSeries<S>& a) {
  int dim = t.dim();
  if (a.N != dim) throw std::invalid_argument("translate: dimension mismatch");
  for (int k = 0; k <= std::min(1, a.K); ++k)
    for (int r = 0; r < dim; ++r)
      if (!ScalarOps<S>::is_zero(a.c[static_cast<size_t>(k)][static_cast<size_t>(r)]))
        throw std::invalid_argument("translate: a(z) must start at z^2");

  struct Ext {
    int i;
    int j;
    S coeff;
  };
  std::vector<Ext> alphabet;
  for (int j = 2; j <= a.K; ++j)
    for (int i = 0; i < dim; ++i)
      if (!ScalarOps<S>::is_zero(a.c[static_cast<size_t>(j)][static_cast<size_t>(i)]))
        alphabet.push_back({i, j, a.c[static_cast<size_t>(j)][static_cast<size_t>(i)]});

  CorrelatorTable<S> out;
  out.sqrt_thetas = t.sqrt_thetas;
  out.g_max = t.g_max;
  out.n_bound.resize(static_cast<size_t>(t.g_max) + 1);
  for (int g = 0; g <= t.g_max; ++g)
    out.n_bound[static_cast<size_t>(g)] = (t.n_bound[static_cast<size_t>(g)] - 3 * g + 3) / 2;

  for (int g = 0; g <= t.g_max; ++g) {
    for (int n = 0; n <= out.n_bound[static_cast<size_t>(g)]; ++n) {
      if (!moduli_stable(g, n)) continue;
      int d = moduli_dim(g, n);
      for_each_slot_multiset(dim, n, d, [&](const std::vector<std::pair<int, int>>& key_slots) {
        long base_sum = 0;
        for (const auto& s : key_slots) base_sum += s.second;
        S acc = ScalarOps<S>::zero();
        // Multisets of extra insertions; each (i,j) costs j-1 units of the
        // remaining dimension budget, so the recursion terminates. The sign
        // (-1)^m and the 1/mult! weights are folded into coeff as letters
        // are appended: the count-th copy of a letter multiplies by
        // -coeff_letter/count.
        std::vector<std::pair<int, int>> extras;
        std::function<void(size_t, long, S)> rec = [&](size_t pos, long budget, S coeff) {
          {
            std::vector<std::pair<int, int>> slots = key_slots;
            slots.insert(slots.end(), extras.begin(), extras.end());
            acc += coeff * t.lookup(g, std::move(slots));
          }
          for (size_t p = pos; p < alphabet.size(); ++p) {
            long cost = alphabet[p].j - 1;
            S c = coeff;
            long b = budget;
            int count = 0;
            while (cost <= b) {
              ++count;
              b -= cost;
              c = c * alphabet[p].coeff / ScalarOps<S>::from_long(-count);
              extras.emplace_back(alphabet[p].i, alphabet[p].j);
              rec(p + 1, b, c);
            }
            extras.resize(extras.size() - static_cast<size_t>(count));
          }
        };
        rec(0, d - base_sum, ScalarOps<S>::one());
        TableKey key{g, key_slots};
        out.set(std::move(key), std::move(acc));
      });
    }
  }
  return out;
}

// Twist by an End(A)-valued group element g(z) with g(0) = Id: every
// insertion v psi^b is replaced by g^{-1}(psi) v psi^b. Since the inverse is
// an honest power series, g must carry enough coefficients to cover the
// largest dimension the table can reach.
template <class S>
CorrelatorTable<S> gl_twist(const CorrelatorTable<S>& t, const EndSeries<S>& g_series) {
  int dim = t.dim();
  if (g_series.N != dim) throw std::invalid_argument("gl: dimension mismatch");
  if (!matrices_equal(g_series.c[0], Matrix<S>::identity(dim)))
    throw std::invalid_argument("gl: constant term must be the identity");
  int max_dim = 0;
  for (int g = 0; g <= t.g_max; ++g) {
    int nb = t.n_bound[static_cast<size_t>(g)];
    if (moduli_stable(g, nb)) max_dim = std::max(max_dim, moduli_dim(g, nb));
  }
  if (g_series.K < max_dim)
    throw std::invalid_argument("gl: series order " + std::to_string(g_series.K) +
                                " too low for table bounds (need " + std::to_string(max_dim) +
                                ")");
  EndSeries<S> ginv = es_inverse(g_series);

  CorrelatorTable<S> out;
  out.sqrt_thetas = t.sqrt_thetas;
  out.g_max = t.g_max;
  out.n_bound = t.n_bound;

  for (int g = 0; g <= t.g_max; ++g) {
    for (int n = 0; n <= t.n_bound[static_cast<size_t>(g)]; ++n) {
      if (!moduli_stable(g, n)) continue;
      int d = moduli_dim(g, n);
      for_each_slot_multiset(dim, n, d, [&](const std::vector<std::pair<int, int>>& key_slots) {
        long base_sum = 0;
        for (const auto& s : key_slots) base_sum += s.second;
        S acc = ScalarOps<S>::zero();
        std::vector<std::pair<int, int>> built(key_slots.size());
        // Per slot (r,b): sum over k >= 0 and i of ginv_k(i,r), with the
        // looked-up power raised to b+k. Dimension caps the total raise.
        std::function<void(size_t, long, S)> rec = [&](size_t pos, long budget, S coeff) {
          if (pos == key_slots.size()) {
            acc += coeff * t.lookup(g, built);
            return;
          }
          auto [r, b] = key_slots[pos];
          for (int k = 0; k <= budget && k <= ginv.K; ++k) {
            const Matrix<S>& m = ginv.c[static_cast<size_t>(k)];
            for (int i = 0; i < dim; ++i) {
              const S& gc = m(i, r);
              if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(gc)) continue;
              built[pos] = {i, b + k};
              rec(pos + 1, budget - k, coeff * gc);
            }
          }
        };
        rec(0, d - base_sum, ScalarOps<S>::one());
        TableKey key{g, key_slots};
        out.set(std::move(key), std::move(acc));
      });
    }
  }
  return out;
}

// Symmetry of a bivector-valued series in frame coordinates:
// V_pq(r,s) = V_qp(s,r).
template <class S>
bool bi_symmetric_frame(const BiSeries<S>& v) {
  for (int p = 0; p <= v.K; ++p)
    for (int q = 0; q <= v.K - p; ++q)
      if (!matrices_equal(v.at(p, q), v.at(q, p).transpose())) return false;
  return true;
}

// Separating contribution: ordered splits of the insertion multiset and the
// genus, one node insertion on each side, contracted with V.
template <class S>
S delta_sep(const CorrelatorTable<S>& first, const CorrelatorTable<S>& second,
            const BiSeries<S>& v, int g, const std::vector<std::pair<int, int>>& slots) {
  int dim = first.dim();
  S acc = ScalarOps<S>::zero();
  for_each_submultiset(slots, [&](const std::vector<std::pair<int, int>>& sub,
                                  const std::vector<std::pair<int, int>>& rest,
                                  const mpz_class& count) {
    int n1 = static_cast<int>(sub.size()) + 1;
    int n2 = static_cast<int>(rest.size()) + 1;
    long sum1 = 0, sum2 = 0;
    for (const auto& s : sub) sum1 += s.second;
    for (const auto& s : rest) sum2 += s.second;
    S cnt = ScalarOps<S>::from_rational(Rational(count));
    for (int g1 = 0; g1 <= g; ++g1) {
      int g2 = g - g1;
      if (!moduli_stable(g1, n1) || !moduli_stable(g2, n2)) continue;
      long pcap = moduli_dim(g1, n1) - sum1;
      long qcap = moduli_dim(g2, n2) - sum2;
      if (pcap < 0 || qcap < 0) continue;
      for (int p = 0; p <= pcap && p <= v.K; ++p) {
        for (int q = 0; q <= qcap && p + q <= v.K; ++q) {
          const Matrix<S>& m = v.at(p, q);
          for (int r = 0; r < dim; ++r) {
            std::vector<std::pair<int, int>> side1 = sub;
            side1.emplace_back(r, p);
            S va = ScalarOps<S>::zero();
            bool have_va = false;
            for (int s = 0; s < dim; ++s) {
              const S& c = m(r, s);
              if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(c)) continue;
              if (!have_va) {
                va = first.lookup(g1, side1);
                have_va = true;
              }
              if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(va)) break;
              std::vector<std::pair<int, int>> side2 = rest;
              side2.emplace_back(s, q);
              acc += cnt * c * va * second.lookup(g2, std::move(side2));
            }
          }
        }
      }
    }
  });
  return acc;
}

// Nonseparating contribution: genus drops by one, both node insertions land
// on the same component.
template <class S>
S delta_nonsep(const CorrelatorTable<S>& lower, const BiSeries<S>& v, int g,
               const std::vector<std::pair<int, int>>& slots) {
  S acc = ScalarOps<S>::zero();
  if (g == 0) return acc;
  int n = static_cast<int>(slots.size());
  if (!moduli_stable(g - 1, n + 2)) return acc;
  long sum = 0;
  for (const auto& s : slots) sum += s.second;
  long cap = moduli_dim(g - 1, n + 2) - sum;
  if (cap < 0) return acc;
  int dim = lower.dim();
  for (int p = 0; p <= cap && p <= v.K; ++p) {
    for (int q = 0; p + q <= cap && p + q <= v.K; ++q) {
      const Matrix<S>& m = v.at(p, q);
      for (int r = 0; r < dim; ++r) {
        for (int s = 0; s < dim; ++s) {
          const S& c = m(r, s);
          if (ScalarOps<S>::exact && ScalarOps<S>::is_zero(c)) continue;
          std::vector<std::pair<int, int>> inner = slots;
          inner.emplace_back(r, p);
          inner.emplace_back(s, q);
          acc += c * lower.lookup(g - 1, std::move(inner));
        }
      }
    }
  }
  return acc;
}

// One boundary-pushing derivative: the increment table
// -(1/2) [ sep(T,T) + nonsep(T) ] on the same bounds.
template <class S>
CorrelatorTable<S> delta_step(const CorrelatorTable<S>& t, const BiSeries<S>& v) {
  if (v.N != t.dim()) throw std::invalid_argument("delta: dimension mismatch");
  if (!bi_symmetric_frame(v)) throw std::invalid_argument("delta: V must be symmetric");
  CorrelatorTable<S> out;
  out.sqrt_thetas = t.sqrt_thetas;
  out.g_max = t.g_max;
  out.n_bound = t.n_bound;
  S minus_half = ScalarOps<S>::from_rational(Rational(-1, 2));
  for (int g = 0; g <= t.g_max; ++g) {
    for (int n = 0; n <= t.n_bound[static_cast<size_t>(g)]; ++n) {
      if (!moduli_stable(g, n)) continue;
      for_each_slot_multiset(
          t.dim(), n, moduli_dim(g, n), [&](const std::vector<std::pair<int, int>>& key_slots) {
            S rhs = delta_sep(t, t, v, g, key_slots) + delta_nonsep(t, v, g, key_slots);
            out.set(TableKey{g, key_slots}, minus_half * rhs);
          });
    }
  }
  return out;
}

// Exponential of the boundary derivative, computed as the Taylor flow of the
// quadratic ODE Z' = -(1/2)[sep(Z,Z) + nonsep(Z)] at time 1. Terminates
// because each derivative lowers the maximal dimension budget by one.
template <class S>
CorrelatorTable<S> exp_delta(const CorrelatorTable<S>& t, const BiSeries<S>& v) {
  if (v.N != t.dim()) throw std::invalid_argument("delta: dimension mismatch");
  if (!bi_symmetric_frame(v)) throw std::invalid_argument("delta: V must be symmetric");
  int cap = 0;
  for (int g = 0; g <= t.g_max; ++g) {
    int nb = t.n_bound[static_cast<size_t>(g)];
    if (moduli_stable(g, nb)) cap = std::max(cap, moduli_dim(g, nb));
  }
  std::vector<CorrelatorTable<S>> zs{t};
  CorrelatorTable<S> result = t;
  Rational fact(1);
  S minus_half = ScalarOps<S>::from_rational(Rational(-1, 2));
  for (int m = 1; m <= cap + 1; ++m) {
    CorrelatorTable<S> zm;
    zm.sqrt_thetas = t.sqrt_thetas;
    zm.g_max = t.g_max;
    zm.n_bound = t.n_bound;
    for (int g = 0; g <= t.g_max; ++g) {
      for (int n = 0; n <= t.n_bound[static_cast<size_t>(g)]; ++n) {
        if (!moduli_stable(g, n)) continue;
        for_each_slot_multiset(
            t.dim(), n, moduli_dim(g, n), [&](const std::vector<std::pair<int, int>>& key_slots) {
              S rhs = delta_nonsep(zs[static_cast<size_t>(m - 1)], v, g, key_slots);
              for (int k = 0; k <= m - 1; ++k) {
                const auto& a = zs[static_cast<size_t>(k)];
                const auto& b = zs[static_cast<size_t>(m - 1 - k)];
                if (a.empty_entries() || b.empty_entries()) continue;
                S coef = ScalarOps<S>::from_rational(binomial(m - 1, k));
                rhs += coef * delta_sep(a, b, v, g, key_slots);
              }
              zm.set(TableKey{g, key_slots}, minus_half * rhs);
            });
      }
    }
    if (zm.empty_entries()) break;
    fact *= Rational(m);
    result.add_scaled(zm, ScalarOps<S>::from_rational(Rational(1) / fact));
    zs.push_back(std::move(zm));
  }
  return result;
}

// Conjugation of a symmetric bivector series by a group element:
// (Ad_g V)_pq = sum g_{p-p0} V_{p0 q0} g_{q-q0}^T.
template <class S>
BiSeries<S> ad_conjugate(const EndSeries<S>& g_series, const BiSeries<S>& v) {
  if (g_series.N != v.N) throw std::invalid_argument("ad: dimension mismatch");
  if (g_series.K < v.K) throw std::invalid_argument("ad: series order too low");
  BiSeries<S> out(v.K, v.N);
  for (int p = 0; p <= v.K; ++p)
    for (int q = 0; q <= v.K - p; ++q)
      for (int p0 = 0; p0 <= p; ++p0)
        for (int q0 = 0; q0 <= q; ++q0) {
          if (p0 + q0 > v.K) continue;
          out.at(p, q) += g_series.c[static_cast<size_t>(p - p0)] * v.at(p0, q0) *
                          g_series.c[static_cast<size_t>(q - q0)].transpose();
        }
  return out;
}

// A first-order translation part lands in a rescaling of the frame metric.
template <class S>
std::vector<S> rescale_sqrt_thetas(const std::vector<S>& sqrt_thetas,
                                   const std::vector<S>& zeta1_frame) {
  if (zeta1_frame.size() != sqrt_thetas.size())
    throw std::invalid_argument("rescale: dimension mismatch");
  std::vector<S> out(sqrt_thetas.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = sqrt_thetas[i] * (ScalarOps<S>::one() + zeta1_frame[i]);
  return out;
}

template <class S>
Frame<S> orthonormal_frame_data(const std::vector<S>& sqrt_thetas) {
  Frame<S> f;
  int n = static_cast<int>(sqrt_thetas.size());
  f.idempotents.assign(static_cast<size_t>(n), std::vector<S>(static_cast<size_t>(n),
                                                              ScalarOps<S>::zero()));
  f.thetas.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    f.idempotents[static_cast<size_t>(i)][static_cast<size_t>(i)] =
        sqrt_thetas[static_cast<size_t>(i)];
    f.thetas[static_cast<size_t>(i)] =
        sqrt_thetas[static_cast<size_t>(i)] * sqrt_thetas[static_cast<size_t>(i)];
  }
  f.has_sqrt = true;
  f.sqrt_thetas = sqrt_thetas;
  f.pi = Matrix<S>::identity(n);
  return f;
}

template <class S>
struct BuildResult {
  CorrelatorTable<S> table;       // restricted to rectangular (g_max, n_max)
  CorrelatorTable<S> full_table;  // on the closure bounds
  std::vector<int> trivial_bounds;
  std::vector<int> closure_bounds;
  int required_order = 0;
};

// Full pipeline in frame coordinates: trivial theory at closure bounds,
// translate by the vacuum vector of E, flow by the nodal propagator of E,
// then twist by E itself. Bounds are grown backward so every intermediate
// stage is closed under its operation.
template <class S>
BuildResult<S> build_cohft(const std::vector<S>& sqrt_thetas, const EndSeries<S>& e_frame,
                           int g_max, int n_max, const WkOracle& oracle,
                           bool skip_translate_stage = false) {
  int dim = static_cast<int>(sqrt_thetas.size());
  if (e_frame.N != dim) throw std::invalid_argument("build: dimension mismatch");
  if (!matrices_equal(e_frame.c[0], Matrix<S>::identity(dim)))
    throw std::invalid_argument("build: E(0) must be the identity");

  FrobeniusAlgebra<S> alg = FrobeniusAlgebra<S>::orthonormal_frame(sqrt_thetas);
  if (!check_symplectic(alg, e_frame))
    throw std::invalid_argument("build: E is not symplectic");

  BuildResult<S> res;
  res.closure_bounds.resize(static_cast<size_t>(g_max) + 1);
  res.trivial_bounds.resize(static_cast<size_t>(g_max) + 1);
  int dmax = 0;
  for (int g = 0; g <= g_max; ++g) {
    int bstar = n_max + 2 * (g_max - g);
    res.closure_bounds[static_cast<size_t>(g)] = bstar;
    res.trivial_bounds[static_cast<size_t>(g)] = 2 * bstar + 3 * g - 3;
    dmax = std::max(dmax, 3 * g - 3 + res.trivial_bounds[static_cast<size_t>(g)]);
  }
  res.required_order = dmax;
  if (e_frame.K < dmax)
    throw std::invalid_argument("build: E series order " + std::to_string(e_frame.K) +
                                " too low (need " + std::to_string(dmax) + ")");

  Frame<S> frame = orthonormal_frame_data(sqrt_thetas);
  ZetaData<S> zeta = zeta_from_E(alg, frame, e_frame);
  NodalW<S> w = W_from_E(alg, e_frame);
  if (!w.symplectic_ok || !w.symmetric)
    throw std::invalid_argument("build: nodal propagator of E is not symmetric");
  // Node bivector: the two branches read W with swapped variables. The swap
  // matters only for the part of W that is odd under transpose at fixed
  // (p, q); the orientation used here is the one that closes the string and
  // dilaton equations on the built theory.
  BiSeries<S> v_node = bs_swap_vars(w.w);

  CorrelatorTable<S> t0 = trivial_theory(sqrt_thetas, g_max, res.trivial_bounds, oracle);
  // skip_translate_stage exists as a negative control: without the vacuum
  // translation the flat-identity equations must fail downstream.
  CorrelatorTable<S> t1 =
      skip_translate_stage ? t0.restrict_bounds(g_max, res.closure_bounds)
                           : translate(t0, zeta.zeta);
  CorrelatorTable<S> t2 = exp_delta(t1, v_node);
  res.full_table = gl_twist(t2, e_frame);
  res.table = res.full_table.restrict_bounds(g_max, rectangular_bounds(g_max, n_max));
  return res;
}

// Visit all multisets of exactly m frame indices with the weight
// (-1)^m prod u_i^mult / prod mult!.
template <class S, class F>
void for_each_u_multiset(const std::vector<S>& u, int m, F&& visit) {
  int dim = static_cast<int>(u.size());
  std::vector<int> counts(static_cast<size_t>(dim), 0);
  std::function<void(int, int, S)> rec = [&](int i, int left, S coeff) {
    if (i == dim) {
      if (left == 0) visit(counts, coeff);
      return;
    }
    S c = coeff;
    for (int k = 0; k <= left; ++k) {
      counts[static_cast<size_t>(i)] = k;
      if (k > 0) c = c * u[static_cast<size_t>(i)] / ScalarOps<S>::from_long(-k);
      rec(i + 1, left - k, c);
    }
    counts[static_cast<size_t>(i)] = 0;
  };
  rec(0, m, ScalarOps<S>::one());
}

// Deformation along u: extra unit-power insertions of u up to the given
// order. Bounds shrink by the order.
template <class S>
CorrelatorTable<S> u_deform(const CorrelatorTable<S>& t, const std::vector<S>& u, int order) {
  int dim = t.dim();
  if (static_cast<int>(u.size()) != dim) throw std::invalid_argument("deform: dimension mismatch");
  if (order < 0) throw std::invalid_argument("deform: negative order");
  CorrelatorTable<S> out;
  out.sqrt_thetas = t.sqrt_thetas;
  out.g_max = t.g_max;
  out.n_bound.resize(static_cast<size_t>(t.g_max) + 1);
  for (int g = 0; g <= t.g_max; ++g)
    out.n_bound[static_cast<size_t>(g)] = t.n_bound[static_cast<size_t>(g)] - order;

  for (int g = 0; g <= t.g_max; ++g) {
    for (int n = 0; n <= out.n_bound[static_cast<size_t>(g)]; ++n) {
      if (!moduli_stable(g, n)) continue;
      // New insertions raise the dimension budget along with n, so the
      // support cap rises by the order as well.
      for_each_slot_multiset(
          dim, n, moduli_dim(g, n) + order,
          [&](const std::vector<std::pair<int, int>>& key_slots) {
            S acc = ScalarOps<S>::zero();
            for (int m = 0; m <= order; ++m) {
              for_each_u_multiset(u, m, [&](const std::vector<int>& counts, const S& coeff) {
                std::vector<std::pair<int, int>> slots = key_slots;
                for (int i = 0; i < dim; ++i)
                  for (int k = 0; k < counts[static_cast<size_t>(i)]; ++k)
                    slots.emplace_back(i, 0);
                acc += coeff * t.lookup(g, std::move(slots));
              });
            }
            out.set(TableKey{g, key_slots}, std::move(acc));
          });
    }
  }
  return out;
}

template <class S>
struct QuantumProduct {
  std::vector<std::vector<Matrix<S>>> structure_by_order;  // [m][k](i,j)
  std::vector<Matrix<S>> structure;                        // summed over orders
  bool associative = true;
};

// Genus-zero three-point functions deformed along u, read as structure
// constants in the orthonormal frame (the pairing is the identity there).
// Associativity is checked separately at each order in the deformation
// parameter, which is exact on a truncated table.
template <class S>
QuantumProduct<S> quantum_product(const CorrelatorTable<S>& t, const std::vector<S>& u,
                                  int order) {
  int dim = t.dim();
  if (static_cast<int>(u.size()) != dim) throw std::invalid_argument("deform: dimension mismatch");
  QuantumProduct<S> qp;
  qp.structure_by_order.resize(static_cast<size_t>(order) + 1);
  for (int m = 0; m <= order; ++m) {
    auto& cm = qp.structure_by_order[static_cast<size_t>(m)];
    cm.assign(static_cast<size_t>(dim), Matrix<S>(dim, dim));
    for_each_u_multiset(u, m, [&](const std::vector<int>& counts, const S& coeff) {
      std::vector<std::pair<int, int>> extras;
      for (int i = 0; i < dim; ++i)
        for (int k = 0; k < counts[static_cast<size_t>(i)]; ++k) extras.emplace_back(i, 0);
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
          for (int k = 0; k < dim; ++k) {
            std::vector<std::pair<int, int>> slots = extras;
            slots.emplace_back(i, 0);
            slots.emplace_back(j, 0);
            slots.emplace_back(k, 0);
            S term = coeff * t.lookup(0, std::move(slots));
            cm[static_cast<size_t>(k)](i, j) += term;
            if (i != j) cm[static_cast<size_t>(k)](j, i) += term;
          }
    });
  }
  // (e_i e_j) e_l vs e_i (e_j e_l), order by order.
  for (int m = 0; m <= order && qp.associative; ++m) {
    for (int i = 0; i < dim && qp.associative; ++i)
      for (int j = 0; j < dim && qp.associative; ++j)
        for (int l = 0; l < dim && qp.associative; ++l)
          for (int w = 0; w < dim && qp.associative; ++w) {
            S lhs = ScalarOps<S>::zero();
            S rhs = ScalarOps<S>::zero();
            for (int m1 = 0; m1 <= m; ++m1) {
              int m2 = m - m1;
              const auto& c1 = qp.structure_by_order[static_cast<size_t>(m1)];
              const auto& c2 = qp.structure_by_order[static_cast<size_t>(m2)];
              for (int k = 0; k < dim; ++k) {
                lhs += c1[static_cast<size_t>(k)](i, j) * c2[static_cast<size_t>(w)](k, l);
                rhs += c1[static_cast<size_t>(k)](j, l) * c2[static_cast<size_t>(w)](i, k);
              }
            }
            if (!ScalarOps<S>::is_zero(lhs - rhs)) qp.associative = false;
          }
  }
  qp.structure.assign(static_cast<size_t>(dim), Matrix<S>(dim, dim));
  for (int m = 0; m <= order; ++m)
    for (int k = 0; k < dim; ++k)
      qp.structure[static_cast<size_t>(k)] += qp.structure_by_order[static_cast<size_t>(m)]
                                                                   [static_cast<size_t>(k)];
  return qp;
}

// Genus-by-genus potential evaluated on polynomial insertion data:
// x[a] is the frame-coordinate vector coupled to psi^a.
template <class S>
std::vector<S> potential_terms(const CorrelatorTable<S>& t,
                               const std::vector<std::vector<S>>& x, int g_order) {
  if (g_order > t.g_max) throw TableBounds("potential: genus beyond table bounds");
  std::vector<S> f(static_cast<size_t>(g_order) + 1, ScalarOps<S>::zero());
  for (const auto& [key, val] : t.entries) {
    if (key.g > g_order) continue;
    S weight = ScalarOps<S>::one();
    bool zero = false;
    for (size_t s = 0; s < key.slots.size() && !zero; ++s) {
      auto [i, a] = key.slots[s];
      if (a >= static_cast<int>(x.size())) {
        zero = true;
        break;
      }
      int mult = 1;
      while (s + 1 < key.slots.size() && key.slots[s + 1] == key.slots[s]) {
        ++mult;
        ++s;
      }
      const S& xc = x[static_cast<size_t>(a)][static_cast<size_t>(i)];
      for (int k = 1; k <= mult; ++k) weight = weight * xc / ScalarOps<S>::from_long(k);
    }
    if (!zero) f[static_cast<size_t>(key.g)] += val * weight;
  }
  return f;
}

struct StringDilatonReport {
  bool string_ok = true;
  bool dilaton_ok = true;
  long string_checked = 0;
  long dilaton_checked = 0;
};

// Unit insertions at psi^0 (string) and psi^1 (dilaton) against every key
// the table bounds allow. The unit has frame coordinates sqrt_thetas.
template <class S>
StringDilatonReport string_dilaton_check(const CorrelatorTable<S>& t) {
  StringDilatonReport rep;
  int dim = t.dim();
  for (int g = 0; g <= t.g_max; ++g) {
    int nb = t.n_bound[static_cast<size_t>(g)];
    for (int n = 0; n + 1 <= nb; ++n) {
      if (!moduli_stable(g, n)) continue;
      int d = moduli_dim(g, n);
      // String: the psi budget on the left side is one higher.
      for_each_slot_multiset(dim, n, d + 1,
                             [&](const std::vector<std::pair<int, int>>& key_slots) {
                               S lhs = ScalarOps<S>::zero();
                               for (int i = 0; i < dim; ++i) {
                                 std::vector<std::pair<int, int>> slots = key_slots;
                                 slots.emplace_back(i, 0);
                                 lhs += t.sqrt_thetas[static_cast<size_t>(i)] *
                                        t.lookup(g, std::move(slots));
                               }
                               S rhs = ScalarOps<S>::zero();
                               for (size_t s = 0; s < key_slots.size(); ++s) {
                                 if (key_slots[s].second == 0) continue;
                                 std::vector<std::pair<int, int>> slots = key_slots;
                                 slots[s].second -= 1;
                                 rhs += t.lookup(g, std::move(slots));
                               }
                               ++rep.string_checked;
                               if (!ScalarOps<S>::is_zero(lhs - rhs)) rep.string_ok = false;
                             });
      // Dilaton.
      for_each_slot_multiset(dim, n, d,
                             [&](const std::vector<std::pair<int, int>>& key_slots) {
                               S lhs = ScalarOps<S>::zero();
                               for (int i = 0; i < dim; ++i) {
                                 std::vector<std::pair<int, int>> slots = key_slots;
                                 slots.emplace_back(i, 1);
                                 lhs += t.sqrt_thetas[static_cast<size_t>(i)] *
                                        t.lookup(g, std::move(slots));
                               }
                               S rhs = ScalarOps<S>::from_long(2 * g - 2 + n) *
                                       t.lookup(g, key_slots);
                               ++rep.dilaton_checked;
                               if (!ScalarOps<S>::is_zero(lhs - rhs)) rep.dilaton_ok = false;
                             });
    }
  }
  return rep;
}

// Agreement of two tables on the intersection of their bounds.
template <class S>
bool tables_agree(const CorrelatorTable<S>& a, const CorrelatorTable<S>& b) {
  int g_max = std::min(a.g_max, b.g_max);
  auto within = [&](const TableKey& key) {
    if (key.g > g_max) return false;
    int n = static_cast<int>(key.slots.size());
    return n <= a.n_bound[static_cast<size_t>(key.g)] &&
           n <= b.n_bound[static_cast<size_t>(key.g)];
  };
  for (const auto& [key, val] : a.entries) {
    if (!within(key)) continue;
    if (!ScalarOps<S>::is_zero(val - b.lookup(key.g, key.slots))) return false;
  }
  for (const auto& [key, val] : b.entries) {
    if (!within(key)) continue;
    if (!ScalarOps<S>::is_zero(val - a.lookup(key.g, key.slots))) return false;
  }
  return true;
}

}  // namespace cohft
