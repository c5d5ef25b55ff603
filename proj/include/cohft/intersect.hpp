#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "cohft/rational.hpp"

namespace cohft {

inline bool moduli_stable(int g, int n) {
  if (g < 0 || n < 0) return false;
  if (g == 0) return n >= 3;
  if (g == 1) return n >= 1;
  return true;
}

inline int moduli_dim(int g, int n) { return 3 * g - 3 + n; }

// Enumerate sub-multisets of a sorted multiset together with the number of
// ways to pick them from distinguishable slots (product of binomials).
// Visitor receives (subset, complement, count).
template <class T, class F>
void for_each_submultiset(const std::vector<T>& sorted, F&& visit) {
  // Distinct values with multiplicities.
  std::vector<std::pair<T, int>> runs;
  for (const T& v : sorted) {
    if (!runs.empty() && runs.back().first == v)
      ++runs.back().second;
    else
      runs.emplace_back(v, 1);
  }
  std::vector<int> take(runs.size(), 0);
  std::function<void(size_t)> rec = [&](size_t idx) {
    if (idx == runs.size()) {
      std::vector<T> sub, rest;
      mpz_class count = 1;
      for (size_t i = 0; i < runs.size(); ++i) {
        for (int t = 0; t < take[i]; ++t) sub.push_back(runs[i].first);
        for (int t = take[i]; t < runs[i].second; ++t) rest.push_back(runs[i].first);
        mpz_class b;
        mpz_bin_uiui(b.get_mpz_t(), runs[i].second, static_cast<unsigned long>(take[i]));
        count *= b;
      }
      visit(sub, rest, count);
      return;
    }
    for (int t = 0; t <= runs[idx].second; ++t) {
      take[idx] = t;
      rec(idx + 1);
    }
  };
  rec(0);
}

// psi-intersection numbers on Deligne-Mumford space, computed from the string
// and dilaton equations plus the Virasoro-style recursion on the largest
// exponent. Deliberately self-contained: this class is the cross-check
// authority for the rest of the engine.
class WkOracle {
 public:
  enum class Tag { Ok, Unstable, Unbalanced };
  struct Result {
    Rational value;
    Tag tag;
  };

  Result query(int g, std::vector<int> exps) const {
    int n = static_cast<int>(exps.size());
    if (!moduli_stable(g, n)) return {Rational(0), Tag::Unstable};
    long sum = 0;
    for (int a : exps) {
      if (a < 0) return {Rational(0), Tag::Unbalanced};
      sum += a;
    }
    if (sum != moduli_dim(g, n)) return {Rational(0), Tag::Unbalanced};
    std::sort(exps.begin(), exps.end(), std::greater<int>());
    std::lock_guard<std::recursive_mutex> lock(mu_);
    return {wk(g, exps), Tag::Ok};
  }

  // Plain value with unstable/unbalanced collapsed to 0.
  Rational value(int g, const std::vector<int>& exps) const {
    Result r = query(g, exps);
    return r.tag == Tag::Ok ? r.value : Rational(0);
  }

  // kappa-psi integrals via iterated pushforward to pure psi integrals.
  // kappa0_direct substitutes the Euler-characteristic scalar for kappa_0;
  // otherwise kappa_0 runs through the same subset expansion. largest_first
  // picks the expansion order (either order must agree).
  Result kappa_psi(int g, std::vector<int> kappas, std::vector<int> psis,
                   bool largest_first = true, bool kappa0_direct = true) const {
    int n = static_cast<int>(psis.size());
    if (!moduli_stable(g, n)) return {Rational(0), Tag::Unstable};
    long sum = 0;
    for (int a : psis) sum += a;
    for (int j : kappas) {
      if (j < 0) return {Rational(0), Tag::Unbalanced};
      sum += j;
    }
    if (sum != moduli_dim(g, n)) return {Rational(0), Tag::Unbalanced};
    return {kappa_expand(g, std::move(kappas), std::move(psis), largest_first, kappa0_direct),
            Tag::Ok};
  }

  // Translation of the one-dimensional trivial theory by a linear dilaton
  // direction, summed at integrated level: the coefficients must reproduce
  // the binomial expansion of (1+x)^{1-2g}.
  struct FiberReport {
    int g = 0;
    std::vector<Rational> coefficients;
    std::vector<Rational> expected;
    bool pass = false;
  };

  FiberReport fiber_product_check(int g, int order) const {
    FiberReport rep;
    rep.g = g;
    rep.pass = true;
    std::vector<int> base{3 * g - 2};
    Rational denom = value(g, base);
    Rational fact(1);
    for (int m = 0; m <= order; ++m) {
      if (m > 0) fact *= m;
      std::vector<int> exps = base;
      exps.insert(exps.end(), static_cast<size_t>(m), 1);
      Rational coef = value(g, exps) / denom / fact;
      if (m % 2 == 1) coef = -coef;
      rep.coefficients.push_back(coef);
      rep.expected.push_back(binomial(1 - 2 * g, m));
      if (coef != rep.expected.back()) rep.pass = false;
    }
    return rep;
  }

  // All nonzero keys with 3g-3+n <= max_dim, canonically ordered.
  struct TableRow {
    int g;
    std::vector<int> exps;
    Rational value;
  };

  std::vector<TableRow> dump(int max_dim) const {
    std::vector<TableRow> rows;
    for (int g = 0; 3 * g - 3 <= max_dim; ++g) {
      int n_min = g == 0 ? 3 : 1;
      for (int n = n_min; moduli_dim(g, n) <= max_dim; ++n) {
        int d = moduli_dim(g, n);
        std::vector<std::vector<int>> parts;
        partitions_into(d, n, d, parts);
        for (auto& p : parts) rows.push_back({g, p, value(g, p)});
      }
    }
    return rows;
  }

 private:
  static void partitions_into(int total, int slots, int max_part, std::vector<std::vector<int>>& out,
                              std::vector<int> cur = {}) {
    if (static_cast<int>(cur.size()) == slots) {
      if (total == 0) out.push_back(cur);
      return;
    }
    int bound = std::min(total, max_part);
    for (int v = bound; v >= 0; --v) {
      cur.push_back(v);
      partitions_into(total - v, slots, v, out, cur);
      cur.pop_back();
    }
  }

  // Precondition: balanced, stable, exps sorted descending. Caller holds mu_.
  Rational wk(int g, const std::vector<int>& exps) const {
    auto key = std::make_pair(g, exps);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    Rational result = compute(g, exps);
    memo_.emplace(std::move(key), result);
    return result;
  }

  Rational compute(int g, const std::vector<int>& exps) const {
    int n = static_cast<int>(exps.size());
    if (g == 0 && n == 3) return Rational(1);
    if (g == 1 && n == 1) {
      // Coupled string + recursion relation around the one-point base case:
      // 15<tau_0 tau_2> = 3<tau_1> + (1/2)<tau_0^3> and <tau_0 tau_2> = <tau_1>.
      return value(0, {0, 0, 0}) / 24;
    }
    // String equation on a zero exponent.
    if (exps.back() == 0) {
      std::vector<int> rest(exps.begin(), exps.end() - 1);
      Rational acc(0);
      for (size_t j = 0; j < rest.size(); ++j) {
        if (rest[j] == 0) continue;
        std::vector<int> next = rest;
        next[j] -= 1;
        acc += value(g, next);
      }
      return acc;
    }
    // Dilaton equation on an exponent equal to one.
    if (exps.back() == 1) {
      std::vector<int> rest(exps.begin(), exps.end() - 1);
      return Rational(2 * g - 2 + (n - 1)) * value(g, rest);
    }
    // Main recursion on the largest exponent a_0 = k+1, k >= 1.
    int k = exps.front() - 1;
    std::vector<int> rest(exps.begin() + 1, exps.end());
    Rational acc(0);
    for (size_t j = 0; j < rest.size(); ++j) {
      std::vector<int> next = rest;
      next.erase(next.begin() + static_cast<long>(j));
      next.push_back(k + rest[j]);
      Rational coef = Rational(odd_double_factorial(k + rest[j])) / Rational(odd_double_factorial(rest[j] - 1));
      acc += coef * value(g, next);
    }
    Rational quad(0);
    for (int b = 0; b <= k - 1; ++b) {
      int c = k - 1 - b;
      Rational dd(odd_double_factorial(b) * odd_double_factorial(c));
      std::vector<int> nonsep = rest;
      nonsep.push_back(b);
      nonsep.push_back(c);
      Rational inner = value(g - 1, nonsep);
      for_each_submultiset(rest, [&](const std::vector<int>& sub, const std::vector<int>& comp,
                                     const mpz_class& count) {
        for (int g1 = 0; g1 <= g; ++g1) {
          std::vector<int> left = sub;
          left.push_back(b);
          std::vector<int> right = comp;
          right.push_back(c);
          Rational lv = value(g1, left);
          if (lv == 0) continue;
          inner += Rational(count) * lv * value(g - g1, right);
        }
      });
      quad += dd * inner;
    }
    acc += quad / 2;
    return acc / Rational(odd_double_factorial(k + 1));
  }

  Rational kappa_expand(int g, std::vector<int> kappas, std::vector<int> psis, bool largest_first,
                        bool kappa0_direct) const {
    if (kappas.empty()) return value(g, psis);
    Rational scale(1);
    if (kappa0_direct) {
      size_t zeros = 0;
      std::vector<int> keep;
      for (int j : kappas) {
        if (j == 0)
          ++zeros;
        else
          keep.push_back(j);
      }
      if (zeros > 0) {
        Rational e(2 * g - 2 + static_cast<int>(psis.size()));
        for (size_t t = 0; t < zeros; ++t) scale *= e;
        kappas = std::move(keep);
        if (kappas.empty()) return scale * value(g, psis);
      }
    }
    std::sort(kappas.begin(), kappas.end());
    size_t pick = largest_first ? kappas.size() - 1 : 0;
    int j = kappas[pick];
    kappas.erase(kappas.begin() + static_cast<long>(pick));
    Rational acc(0);
    for_each_submultiset(kappas, [&](const std::vector<int>& sub, const std::vector<int>& rest,
                                     const mpz_class& count) {
      long extra = j + 1;
      for (int v : sub) extra += v;
      std::vector<int> np = psis;
      np.push_back(static_cast<int>(extra));
      Rational term = kappa_expand(g, rest, np, largest_first, kappa0_direct);
      if (sub.size() % 2 == 1) term = -term;
      acc += Rational(count) * term * scale;
    });
    return acc;
  }

  mutable std::map<std::pair<int, std::vector<int>>, Rational> memo_;
  mutable std::recursive_mutex mu_;
};

}  // namespace cohft
