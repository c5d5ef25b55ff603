#include <catch2/catch_amalgamated.hpp>

#include <chrono>

#include "cohft/intersect.hpp"

using namespace cohft;

namespace {
Rational psi_value(const WkOracle& o, int g, std::vector<int> exps) {
  return o.value(g, exps);
}
}  // namespace

TEST_CASE("base psi intersection values") {
  WkOracle o;
  CHECK(psi_value(o, 0, {0, 0, 0}) == Rational(1));
  CHECK(psi_value(o, 1, {1}) == Rational(1, 24));
  // The four-point genus-0 space is one-dimensional, so the pure-puncture
  // bracket is unbalanced and the unique nonzero value carries one psi.
  CHECK(o.query(0, {0, 0, 0, 0}).tag == WkOracle::Tag::Unbalanced);
  CHECK(psi_value(o, 0, {0, 0, 0, 0}) == Rational(0));
  CHECK(psi_value(o, 0, {1, 0, 0, 0}) == Rational(1));
  CHECK(psi_value(o, 2, {4}) == Rational(1, 1152));

  // Unstable signatures return zero rather than throwing.
  CHECK(o.query(0, {0, 0}).tag == WkOracle::Tag::Unstable);
  CHECK(o.query(1, {}).tag == WkOracle::Tag::Unstable);
  CHECK(psi_value(o, 0, {1}) == Rational(0));
}

TEST_CASE("one point values follow the closed form 1/(24^g g!)") {
  WkOracle o;
  Rational pow24(1);
  Rational fact(1);
  for (int g = 1; g <= 3; ++g) {
    pow24 *= 24;
    fact *= g;
    CHECK(psi_value(o, g, {3 * g - 2}) == Rational(1) / (pow24 * fact));
  }
}

TEST_CASE("genus zero closed form") {
  WkOracle o;
  // <tau_{a_1}...tau_{a_n}>_0 = (n-3)! / prod a_i! whenever sum a_i = n-3.
  for (int n = 3; n <= 8; ++n) {
    int d = n - 3;
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    std::function<void(int, int, int)> rec = [&](int left, int slots, int maxpart) {
      if (slots == 0) {
        if (left == 0) parts.push_back(cur);
        return;
      }
      for (int v = std::min(left, maxpart); v >= 0; --v) {
        cur.push_back(v);
        rec(left - v, slots - 1, v);
        cur.pop_back();
      }
    };
    rec(d, n, d);
    for (const auto& p : parts) {
      Rational denom(1);
      for (int a : p) denom *= Rational(factorial_mpz(a));
      CHECK(psi_value(o, 0, p) == Rational(factorial_mpz(d)) / denom);
    }
  }
}

TEST_CASE("pinned genus two values") {
  WkOracle o;
  CHECK(psi_value(o, 2, {3, 2}) == Rational(29, 5760));
  CHECK(psi_value(o, 2, {2, 2, 2}) == Rational(7, 240));
  CHECK(psi_value(o, 2, {4, 1}) == Rational(1, 384));
  CHECK(psi_value(o, 2, {5, 0}) == Rational(1, 1152));
}

TEST_CASE("string and dilaton equations hold across the stored table") {
  WkOracle o;
  auto rows = o.dump(7);
  REQUIRE(!rows.empty());
  int checked_string = 0, checked_dilaton = 0;
  for (const auto& row : rows) {
    // String: append a zero exponent and decrement each slot in turn.
    {
      std::vector<int> with0 = row.exps;
      with0.push_back(0);
      Rational rhs(0);
      for (size_t j = 0; j < row.exps.size(); ++j) {
        if (row.exps[j] == 0) continue;
        std::vector<int> dec = row.exps;
        dec[j] -= 1;
        rhs += o.value(row.g, dec);
      }
      CHECK(o.value(row.g, with0) == rhs);
      ++checked_string;
    }
    // Dilaton: append an exponent one.
    {
      std::vector<int> with1 = row.exps;
      with1.push_back(1);
      int n = static_cast<int>(row.exps.size());
      CHECK(o.value(row.g, with1) == Rational(2 * row.g - 2 + n) * row.value);
      ++checked_dilaton;
    }
  }
  CHECK(checked_string > 100);
  CHECK(checked_dilaton > 100);
}

TEST_CASE("kappa values against hand expansions") {
  WkOracle o;
  // Single kappa inserts one extra psi point with no correction terms.
  CHECK(o.kappa_psi(1, {1}, {0}).value == Rational(1, 24));
  CHECK(o.kappa_psi(2, {3}, {}).value == Rational(1, 1152));
  CHECK(o.kappa_psi(0, {1}, {0, 0, 0, 0}).value == Rational(1));
  CHECK(o.kappa_psi(0, {2}, {0, 0, 0, 0, 0}).value == Rational(1));

  // Two and three kappa classes need the inclusion-exclusion corrections:
  // <k1 k1>_{0,5} = <t2 t2 t0^5> - <t3 t0^5> = 6 - 1,
  // <k2 k1>_2     = <t3 t2>_2 - <t4>_2 = 29/5760 - 5/5760,
  // <k1 k1 k1>_2  = (<t2^3> - <t3 t2>) - 2 <t3 t2> + <t4>.
  CHECK(o.kappa_psi(0, {1, 1}, {0, 0, 0, 0, 0}).value == Rational(5));
  CHECK(o.kappa_psi(2, {2, 1}, {}).value == Rational(1, 240));
  CHECK(o.kappa_psi(2, {1, 1, 1}, {}).value == Rational(43, 2880));

  // kappa_0 is the scalar 2g-2+n.
  CHECK(o.kappa_psi(0, {0}, {0, 0, 0}).value == Rational(1));
  CHECK(o.kappa_psi(1, {0, 1}, {0}).value == Rational(1, 24));
  CHECK(o.kappa_psi(1, {0, 0, 1}, {0}).value == Rational(1, 24));
  CHECK(o.kappa_psi(0, {0}, {1, 0, 0, 0}).value == Rational(2));
}

TEST_CASE("kappa expansion is route independent") {
  WkOracle o;
  struct Key {
    int g;
    std::vector<int> kappas, psis;
  };
  std::vector<Key> keys = {
      {2, {1, 1, 1}, {}},      {2, {2, 1}, {}},          {1, {1, 1}, {0}},
      {1, {0, 1, 1}, {0, 0}},  {0, {1, 1}, {0, 0, 0, 0, 0}}, {2, {1}, {2}},
      {1, {2}, {0, 0}},        {0, {2, 1}, {0, 0, 0, 0, 0, 0}}};
  for (const auto& k : keys) {
    auto r00 = o.kappa_psi(k.g, k.kappas, k.psis, false, false);
    auto r01 = o.kappa_psi(k.g, k.kappas, k.psis, false, true);
    auto r10 = o.kappa_psi(k.g, k.kappas, k.psis, true, false);
    auto r11 = o.kappa_psi(k.g, k.kappas, k.psis, true, true);
    CHECK(r00.value == r11.value);
    CHECK(r01.value == r11.value);
    CHECK(r10.value == r11.value);
  }
}

TEST_CASE("linear dilaton fiber expansion matches binomial coefficients") {
  WkOracle o;
  for (int g = 1; g <= 2; ++g) {
    auto rep = o.fiber_product_check(g, 3);
    CHECK(rep.pass);
    REQUIRE(rep.coefficients.size() == 4);
    for (int m = 0; m <= 3; ++m) {
      CHECK(rep.expected[static_cast<size_t>(m)] == binomial(1 - 2 * g, m));
      CHECK(rep.coefficients[static_cast<size_t>(m)] == rep.expected[static_cast<size_t>(m)]);
    }
  }
  CHECK(o.fiber_product_check(1, 2).coefficients ==
        std::vector<Rational>{Rational(1), Rational(-1), Rational(1)});
  CHECK(o.fiber_product_check(2, 2).coefficients ==
        std::vector<Rational>{Rational(1), Rational(-3), Rational(6)});
}

TEST_CASE("full table up to dimension nine is fast and self-consistent") {
  WkOracle o;
  auto start = std::chrono::steady_clock::now();
  auto rows = o.dump(9);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(secs < 5.0);
  // Partition count: sum over stable (g, n) with 3g-3+n <= 9 of the number
  // of partitions of 3g-3+n into at most n parts: 97 + 96 + 66 + 18.
  CHECK(rows.size() == 277);

  // Every dumped value is balanced by construction; spot check a window.
  for (const auto& row : rows) {
    int sum = 0;
    for (int a : row.exps) sum += a;
    REQUIRE(sum == 3 * row.g - 3 + static_cast<int>(row.exps.size()));
  }
}
