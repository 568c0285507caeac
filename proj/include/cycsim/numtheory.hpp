#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cycsim {

using Int = std::int64_t;

struct PrimePower {
  Int prime = 0;
  int exponent = 0;
  Int value() const;
};

// Factors are ordered ascending by prime power, so the last one is the
// largest cyclic subgroup.
struct Factorization {
  Int n = 0;
  std::vector<PrimePower> factors;
};

struct Bezout {
  Int d = 0;
  Int u = 0;
  Int v = 0;
};

struct CrtComponent {
  Int m = 0;  // p_k^{a_k}
  Int M = 0;  // modulus / m
  Int n = 0;  // inverse of M mod m
  Int prime = 0;
  int exponent = 0;
};

struct CrtBasis {
  Int modulus = 0;
  std::vector<CrtComponent> components;
};

struct Congruence {
  Int a = 0;
  Int b = 0;
};

Factorization factorize(Int n);
Bezout extended_gcd(Int a, Int b);
Int gcd(Int a, Int b);
Int euler_totient(const Factorization& f);
Int euler_totient(Int n);
bool is_prime(Int n);

Int mod(Int a, Int m);
Int mul_mod(Int a, Int b, Int m);
Int pow_mod(Int base, Int exp, Int m);
Int inverse_mod(Int a, Int m);
Int multiplicative_order(Int a, Int p);
Int find_primitive_root(Int p);

CrtBasis make_crt_basis(const Factorization& f);
Int crt_compose(std::span<const Int> residues, const CrtBasis& basis);
std::vector<Int> crt_decompose(Int s, const CrtBasis& basis);

std::vector<Int> solve_congruences(std::span<const Congruence> eqs, Int m);
std::vector<Int> multibase_expand(Int s, Int p, int a);
Int classical_dlog(Int p, Int g, Int b);

struct CyclicGroupSpec {
  Int p = 0;
  Int g = 0;
  Factorization factorization;
  CrtBasis basis;
  std::vector<Int> subgroup_generators;

  static CyclicGroupSpec make(Int p, std::optional<Int> g = std::nullopt);

  Int order() const { return p - 1; }
  std::size_t components() const { return basis.components.size(); }
  Int largest_order() const { return basis.components.back().m; }
  Int largest_generator() const { return subgroup_generators.back(); }
  Int power(Int e) const { return pow_mod(g, mod(e, p - 1), p); }
};

}  // namespace cycsim
