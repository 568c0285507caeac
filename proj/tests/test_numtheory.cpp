#include <gtest/gtest.h>

#include <numeric>

#include "cycsim/numtheory.hpp"

using namespace cycsim;

namespace {

// Independent brute-force references.
Int brute_totient(Int n) {
  Int c = 0;
  for (Int k = 1; k <= n; ++k)
    if (std::gcd(k, n) == 1) ++c;
  return c;
}

Int brute_order(Int a, Int p) {
  Int x = a % p;
  for (Int k = 1; k < p; ++k) {
    if (x == 1) return k;
    x = x * a % p;
  }
  return -1;
}

std::vector<Int> brute_solve(const std::vector<Congruence>& eqs, Int m) {
  std::vector<Int> out;
  for (Int x = 0; x < m; ++x) {
    bool ok = true;
    for (const auto& e : eqs) ok = ok && ((e.a * x - e.b) % m + m) % m == 0;
    if (ok) out.push_back(x);
  }
  return out;
}

const std::vector<Int> kPrimes = {3, 5, 7, 11, 13, 29, 61};

}  // namespace

TEST(Factorize, OrdersByPrimePower) {
  auto f = factorize(12);
  ASSERT_EQ(f.factors.size(), 2u);
  EXPECT_EQ(f.factors[0].prime, 3);
  EXPECT_EQ(f.factors[0].exponent, 1);
  EXPECT_EQ(f.factors[1].prime, 2);
  EXPECT_EQ(f.factors[1].exponent, 2);

  auto seven = factorize(7);
  ASSERT_EQ(seven.factors.size(), 1u);
  EXPECT_EQ(seven.factors[0].value(), 7);

  auto sixty = factorize(60);
  std::vector<Int> values;
  for (const auto& pp : sixty.factors) values.push_back(pp.value());
  EXPECT_EQ(values, (std::vector<Int>{3, 4, 5}));
}

TEST(Factorize, ProductAndPrimality) {
  for (Int n = 2; n < 3000; ++n) {
    auto f = factorize(n);
    Int prod = 1;
    for (std::size_t i = 0; i < f.factors.size(); ++i) {
      prod *= f.factors[i].value();
      EXPECT_TRUE(is_prime(f.factors[i].prime));
      if (i > 0) EXPECT_LT(f.factors[i - 1].value(), f.factors[i].value());
    }
    EXPECT_EQ(prod, n);
  }
}

TEST(Factorize, RejectsSmall) {
  EXPECT_THROW(factorize(1), std::domain_error);
  EXPECT_THROW(factorize(0), std::domain_error);
}

TEST(ExtendedGcd, Examples) {
  auto a = extended_gcd(4, 3);
  EXPECT_EQ(a.d, 1);
  EXPECT_EQ(a.u, 1);
  EXPECT_EQ(a.v, -1);
  auto b = extended_gcd(0, 5);
  EXPECT_EQ(b.d, 5);
  EXPECT_EQ(b.u, 0);
  EXPECT_EQ(b.v, 1);
  auto c = extended_gcd(12, 8);
  EXPECT_EQ(c.d, 4);
  EXPECT_EQ(12 * c.u + 8 * c.v, 4);
  EXPECT_THROW(extended_gcd(0, 0), std::domain_error);
}

TEST(ExtendedGcd, BezoutIdentity) {
  for (Int a = -40; a <= 40; ++a)
    for (Int b = -40; b <= 40; ++b) {
      if (a == 0 && b == 0) continue;
      auto r = extended_gcd(a, b);
      EXPECT_EQ(r.d, std::gcd(a, b));
      EXPECT_EQ(r.u * a + r.v * b, r.d);
    }
}

TEST(Totient, Examples) {
  EXPECT_EQ(euler_totient(factorize(12)), 4);
  EXPECT_EQ(euler_totient(factorize(60)), 16);
  EXPECT_EQ(euler_totient(factorize(13)), 12);
}

TEST(Totient, MatchesBruteForceUpTo10k) {
  for (Int n = 2; n <= 10000; ++n) ASSERT_EQ(euler_totient(factorize(n)), brute_totient(n)) << n;
}

TEST(PrimitiveRoot, SmallestRoot) {
  EXPECT_EQ(find_primitive_root(3), 2);
  EXPECT_EQ(find_primitive_root(13), 2);
  EXPECT_EQ(find_primitive_root(7), 3);
  for (Int p : kPrimes) {
    Int g = find_primitive_root(p);
    EXPECT_EQ(brute_order(g, p), p - 1);
    for (Int h = 2; h < g; ++h) EXPECT_NE(brute_order(h, p), p - 1);
  }
  EXPECT_THROW(find_primitive_root(12), std::domain_error);
}

TEST(Crt, ComposeExample) {
  auto spec = CyclicGroupSpec::make(13);
  ASSERT_EQ(spec.basis.components.size(), 2u);
  EXPECT_EQ(spec.basis.components[0].m, 3);
  EXPECT_EQ(spec.basis.components[0].M, 4);
  EXPECT_EQ(spec.basis.components[0].n, 1);
  EXPECT_EQ(spec.basis.components[1].m, 4);
  EXPECT_EQ(spec.basis.components[1].M, 3);
  EXPECT_EQ(spec.basis.components[1].n, 3);
  std::vector<Int> r{1, 3};
  EXPECT_EQ(crt_compose(r, spec.basis), 7);
  std::vector<Int> z{0, 0};
  EXPECT_EQ(crt_compose(z, spec.basis), 0);
  std::vector<Int> bad{3, 0};
  EXPECT_THROW(crt_compose(bad, spec.basis), std::domain_error);
  EXPECT_THROW(crt_decompose(12, spec.basis), std::domain_error);
}

TEST(Crt, RoundTripAllPrimes) {
  for (Int p : kPrimes) {
    auto spec = CyclicGroupSpec::make(p);
    for (const auto& c : spec.basis.components) EXPECT_EQ(c.n * c.M % c.m, c.m == 1 ? 0 : 1);
    for (Int s = 0; s < p - 1; ++s) {
      auto r = crt_decompose(s, spec.basis);
      for (std::size_t k = 0; k < r.size(); ++k) EXPECT_EQ(r[k], s % spec.basis.components[k].m);
      EXPECT_EQ(crt_compose(r, spec.basis), s);
    }
  }
}

TEST(Congruences, Examples) {
  std::vector<Congruence> a{{1, 7}};
  EXPECT_EQ(solve_congruences(a, 12), (std::vector<Int>{7}));
  std::vector<Congruence> b{{4, 4}};
  EXPECT_EQ(solve_congruences(b, 12), (std::vector<Int>{1, 4, 7, 10}));
  std::vector<Congruence> c{{4, 28 % 12}, {3, 21 % 12}};
  EXPECT_EQ(solve_congruences(c, 12), (std::vector<Int>{7}));
  std::vector<Congruence> d{{2, 1}};
  EXPECT_TRUE(solve_congruences(d, 12).empty());
}

TEST(Congruences, MatchBruteForce) {
  for (Int m : {12, 28, 60, 30, 16}) {
    for (Int a1 = 0; a1 < m; a1 += 1)
      for (Int b1 = 0; b1 < m; b1 += 3) {
        std::vector<Congruence> one{{a1, b1}};
        ASSERT_EQ(solve_congruences(one, m), brute_solve(one, m)) << m << " " << a1 << " " << b1;
        for (Int a2 = 1; a2 < m; a2 += 5) {
          std::vector<Congruence> two{{a1, b1}, {a2, (a2 * 7) % m}};
          ASSERT_EQ(solve_congruences(two, m), brute_solve(two, m));
        }
      }
  }
}

TEST(Multibase, Examples) {
  EXPECT_EQ(multibase_expand(3, 2, 2), (std::vector<Int>{1, 1}));
  EXPECT_EQ(multibase_expand(5, 3, 2), (std::vector<Int>{2, 1}));
  EXPECT_EQ(multibase_expand(0, 5, 3), (std::vector<Int>{0, 0, 0}));
  EXPECT_THROW(multibase_expand(9, 3, 2), std::domain_error);
}

TEST(ClassicalDlog, Examples) {
  EXPECT_EQ(classical_dlog(13, 2, 1), 0);
  EXPECT_EQ(classical_dlog(13, 2, 2), 1);
  EXPECT_EQ(classical_dlog(13, 2, 11), 7);
  EXPECT_THROW(classical_dlog(13, 2, 0), std::domain_error);
  EXPECT_THROW(classical_dlog(13, 2, 13), std::domain_error);
}

TEST(ClassicalDlog, ExhaustiveUpTo61) {
  for (Int p : kPrimes) {
    Int g = find_primitive_root(p);
    Int x = 1;
    for (Int s = 0; s < p - 1; ++s) {
      EXPECT_EQ(classical_dlog(p, g, x), s);
      x = x * g % p;
    }
  }
}

TEST(CyclicGroupSpec, SubgroupOrders) {
  for (Int p : kPrimes) {
    auto spec = CyclicGroupSpec::make(p);
    for (std::size_t k = 0; k < spec.components(); ++k)
      EXPECT_EQ(brute_order(spec.subgroup_generators[k], p), spec.basis.components[k].m);
  }
  EXPECT_THROW(CyclicGroupSpec::make(12), std::domain_error);
  EXPECT_THROW(CyclicGroupSpec::make(13, 3), std::domain_error);
}
