#include "cycsim/numtheory.hpp"

#include <algorithm>
#include <string>

namespace cycsim {

Int PrimePower::value() const {
  Int v = 1;
  for (int i = 0; i < exponent; ++i) v *= prime;
  return v;
}

Factorization factorize(Int n) {
  if (n < 2) throw std::domain_error("factorize: n must be >= 2");
  Factorization f;
  f.n = n;
  Int rest = n;
  for (Int q = 2; q * q <= rest; ++q) {
    if (rest % q != 0) continue;
    PrimePower pp{q, 0};
    while (rest % q == 0) {
      rest /= q;
      ++pp.exponent;
    }
    f.factors.push_back(pp);
  }
  if (rest > 1) f.factors.push_back({rest, 1});
  std::sort(f.factors.begin(), f.factors.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.value() < b.value(); });
  return f;
}

Bezout extended_gcd(Int a, Int b) {
  if (a == 0 && b == 0) throw std::domain_error("extended_gcd: both arguments zero");
  Int r0 = a, r1 = b, u0 = 1, u1 = 0, v0 = 0, v1 = 1;
  while (r1 != 0) {
    Int q = r0 / r1;
    Int t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = u0 - q * u1;
    u0 = u1;
    u1 = t;
    t = v0 - q * v1;
    v0 = v1;
    v1 = t;
  }
  if (r0 < 0) return {-r0, -u0, -v0};
  return {r0, u0, v0};
}

Int gcd(Int a, Int b) {
  if (a == 0 && b == 0) return 0;
  return extended_gcd(a, b).d;
}

Int euler_totient(const Factorization& f) {
  Int t = f.n;
  for (const auto& pp : f.factors) t = t / pp.prime * (pp.prime - 1);
  return t;
}

Int euler_totient(Int n) {
  if (n == 1) return 1;
  return euler_totient(factorize(n));
}

bool is_prime(Int n) {
  if (n < 2) return false;
  for (Int q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

Int mod(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

Int mul_mod(Int a, Int b, Int m) {
  return static_cast<Int>((static_cast<__int128>(mod(a, m)) * mod(b, m)) % m);
}

Int pow_mod(Int base, Int exp, Int m) {
  if (exp < 0) throw std::domain_error("pow_mod: negative exponent");
  if (m == 1) return 0;
  Int result = 1;
  Int b = mod(base, m);
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, b, m);
    b = mul_mod(b, b, m);
    exp >>= 1;
  }
  return result;
}

Int inverse_mod(Int a, Int m) {
  auto e = extended_gcd(mod(a, m), m);
  if (e.d != 1) throw std::domain_error("inverse_mod: " + std::to_string(a) + " not invertible mod " + std::to_string(m));
  return mod(e.u, m);
}

Int multiplicative_order(Int a, Int p) {
  if (mod(a, p) == 0) throw std::domain_error("multiplicative_order: a = 0 mod p");
  if (gcd(a, p) != 1) throw std::domain_error("multiplicative_order: a not a unit");
  Int x = mod(a, p);
  Int k = 1;
  while (x != 1) {
    x = mul_mod(x, a, p);
    ++k;
  }
  return k;
}

Int find_primitive_root(Int p) {
  if (!is_prime(p) || p < 3) throw std::domain_error("find_primitive_root: p must be an odd prime");
  auto f = factorize(p - 1);
  for (Int g = 2; g < p; ++g) {
    bool ok = true;
    for (const auto& pp : f.factors) {
      if (pow_mod(g, (p - 1) / pp.prime, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("find_primitive_root: none found");
}

CrtBasis make_crt_basis(const Factorization& f) {
  CrtBasis basis;
  basis.modulus = f.n;
  for (const auto& pp : f.factors) {
    CrtComponent c;
    c.m = pp.value();
    c.M = f.n / c.m;
    c.n = c.m == 1 ? 0 : inverse_mod(c.M, c.m);
    c.prime = pp.prime;
    c.exponent = pp.exponent;
    basis.components.push_back(c);
  }
  return basis;
}

Int crt_compose(std::span<const Int> residues, const CrtBasis& basis) {
  if (residues.size() != basis.components.size()) throw std::domain_error("crt_compose: residue count mismatch");
  Int s = 0;
  for (std::size_t k = 0; k < residues.size(); ++k) {
    const auto& c = basis.components[k];
    if (residues[k] < 0 || residues[k] >= c.m) throw std::domain_error("crt_compose: residue out of range");
    s = mod(s + mul_mod(mul_mod(c.n, c.M, basis.modulus), residues[k], basis.modulus), basis.modulus);
  }
  return s;
}

std::vector<Int> crt_decompose(Int s, const CrtBasis& basis) {
  if (s < 0 || s >= basis.modulus) throw std::domain_error("crt_decompose: s out of range");
  std::vector<Int> r;
  r.reserve(basis.components.size());
  for (const auto& c : basis.components) r.push_back(s % c.m);
  return r;
}

std::vector<Int> solve_congruences(std::span<const Congruence> eqs, Int m) {
  if (m < 1) throw std::domain_error("solve_congruences: modulus must be positive");
  // Each a x = b (mod m) reduces to x = c (mod m/d); the reduced system is
  // merged pairwise, allowing non-coprime moduli.
  Int c = 0, L = 1;
  for (const auto& e : eqs) {
    Int a = mod(e.a, m), b = mod(e.b, m);
    Int d = gcd(a, m);
    if (d == 0) d = m;
    if (b % d != 0) return {};
    Int mk = m / d;
    Int ck = mk == 1 ? 0 : mul_mod(b / d, inverse_mod(a / d, mk), mk);
    Int g = gcd(L, mk);
    if (mod(ck - c, g) != 0) return {};
    Int l2 = L / g * mk;
    // c + L t = ck (mod mk)  =>  t = (ck - c)/g * inv(L/g) mod mk/g
    Int step = mk / g;
    Int t = step == 1 ? 0 : mul_mod((ck - c) / g, inverse_mod(L / g, step), step);
    c = mod(c + L * t, l2);
    L = l2;
  }
  std::vector<Int> out;
  for (Int x = c; x < m; x += L) out.push_back(x);
  return out;
}

std::vector<Int> multibase_expand(Int s, Int p, int a) {
  if (p < 2 || a < 1) throw std::domain_error("multibase_expand: invalid base");
  PrimePower pp{p, a};
  if (s < 0 || s >= pp.value()) throw std::domain_error("multibase_expand: s out of range");
  std::vector<Int> digits(static_cast<std::size_t>(a));
  for (auto& h : digits) {
    h = s % p;
    s /= p;
  }
  return digits;
}

Int classical_dlog(Int p, Int g, Int b) {
  if (b <= 0 || b >= p) throw std::domain_error("classical_dlog: b out of range");
  Int x = 1;
  for (Int s = 0; s < p - 1; ++s) {
    if (x == b) return s;
    x = mul_mod(x, g, p);
  }
  throw std::domain_error("classical_dlog: g is not a primitive root");
}

CyclicGroupSpec CyclicGroupSpec::make(Int p, std::optional<Int> g) {
  if (!is_prime(p) || p < 3) throw std::domain_error("p must be prime");
  CyclicGroupSpec spec;
  spec.p = p;
  spec.g = g ? mod(*g, p) : find_primitive_root(p);
  if (spec.g == 0 || multiplicative_order(spec.g, p) != p - 1)
    throw std::domain_error("g is not a primitive root mod p");
  spec.factorization = factorize(p - 1);
  spec.basis = make_crt_basis(spec.factorization);
  for (const auto& c : spec.basis.components) spec.subgroup_generators.push_back(pow_mod(spec.g, c.M, p));
  return spec;
}

}  // namespace cycsim
