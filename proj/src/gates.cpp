#include "cycsim/gates.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace cycsim {

namespace {

Value reg_dim(const RegisterLayout& layout, const std::string& name) { return layout[layout.index(name)].dim; }

void require_fits(const RegisterLayout& layout, const std::string& reg, Int modulus) {
  if (modulus < 1) throw std::invalid_argument("modulus must be positive");
  if (modulus > static_cast<Int>(reg_dim(layout, reg)))
    throw std::invalid_argument("modulus exceeding register dimension: " + reg);
}

std::string join(const std::vector<std::string>& regs) {
  std::string s;
  for (std::size_t i = 0; i < regs.size(); ++i) s += (i ? "," : "") + regs[i];
  return s;
}

}  // namespace

GateOp make_compute(const RegisterLayout& layout, const std::vector<std::string>& sources, const std::string& target,
                    ComputeFn fn, Int L, std::string label, CostClass cost) {
  require_fits(layout, target, L);
  std::vector<std::string> regs = sources;
  regs.push_back(target);
  const std::size_t t = sources.size();
  auto fwd = [fn, L, t](std::span<Value> v) {
    if (v[t] >= L) return;
    v[t] = static_cast<Value>(mod(static_cast<Int>(v[t]) + fn(v.first(t)), L));
  };
  auto inv = [fn, L, t](std::span<Value> v) {
    if (v[t] >= L) return;
    v[t] = static_cast<Value>(mod(static_cast<Int>(v[t]) - fn(v.first(t)), L));
  };
  return make_permutation(layout, regs, fwd, inv, std::move(label), cost);
}

GateOp add_mod(const RegisterLayout& layout, const std::string& x, const std::string& y, Int L) {
  return make_compute(layout, {x}, y, [](std::span<const Value> v) { return static_cast<Int>(v[0]); }, L,
                      "ADD_" + std::to_string(L) + "(" + x + "," + y + ")");
}

GateOp copy_gate(const RegisterLayout& layout, const std::string& x, const std::string& y, Int L) {
  return make_compute(layout, {x}, y, [](std::span<const Value> v) { return static_cast<Int>(v[0]); }, L,
                      "COPY(" + x + "," + y + ")");
}

GateOp mul3(const RegisterLayout& layout, const std::string& x, const std::string& y, const std::string& z, Int L) {
  return make_compute(
      layout, {x, y}, z,
      [L](std::span<const Value> v) { return mul_mod(v[0], v[1], L); }, L,
      "MUL3_" + std::to_string(L) + "(" + x + "," + y + "," + z + ")");
}

GateOp mod_gate(const RegisterLayout& layout, const std::string& s, const std::string& t, Int m) {
  require_fits(layout, t, m);
  Int d = reg_dim(layout, t);
  return make_compute(layout, {s}, t, [m](std::span<const Value> v) { return static_cast<Int>(v[0]) % m; }, d,
                      "MOD_" + std::to_string(m) + "(" + s + "," + t + ")");
}

GateOp swap_gate(const RegisterLayout& layout, const std::string& a, const std::string& b) {
  Value da = reg_dim(layout, a), db = reg_dim(layout, b);
  // Values that fit in both registers are exchanged; anything else is fixed.
  auto fn = [da, db](std::span<Value> v) {
    if (v[0] < db && v[1] < da) std::swap(v[0], v[1]);
  };
  return make_permutation(layout, {a, b}, fn, fn, "SWAP(" + a + "," + b + ")");
}

GateOp set_const(const RegisterLayout& layout, const std::string& t, Int j, std::optional<Int> modulus) {
  Int L = modulus.value_or(reg_dim(layout, t));
  require_fits(layout, t, L);
  if (j < 0 || j >= L) throw std::invalid_argument("SET_j with j >= d");
  return make_compute(layout, {}, t, [j](std::span<const Value>) { return j; }, L,
                      "SET_" + std::to_string(j) + "(" + t + ")");
}

GateOp make_arith(const RegisterLayout& layout, ArithKind kind, const std::vector<std::string>& regs, Int param,
                  std::optional<Int> modulus) {
  auto need = [&](std::size_t n) {
    if (regs.size() != n) throw std::invalid_argument("make_arith: expected " + std::to_string(n) + " registers");
  };
  switch (kind) {
    case ArithKind::add: need(2); return add_mod(layout, regs[0], regs[1], param);
    case ArithKind::copy: need(2); return copy_gate(layout, regs[0], regs[1], param);
    case ArithKind::mul3: need(3); return mul3(layout, regs[0], regs[1], regs[2], param);
    case ArithKind::mod: need(2); return mod_gate(layout, regs[0], regs[1], param);
    case ArithKind::swap: need(2); return swap_gate(layout, regs[0], regs[1]);
    case ArithKind::set: need(1); return set_const(layout, regs[0], param, modulus);
  }
  throw std::invalid_argument("make_arith: unknown kind");
}

GateOp mul_const(const RegisterLayout& layout, Int a, Int N, const std::string& reg) {
  require_fits(layout, reg, N);
  if (gcd(mod(a, N), N) != 1) throw std::invalid_argument("mul_const: a must be coprime to N");
  Int ai = inverse_mod(a, N);
  Int am = mod(a, N);
  auto fwd = [am, N](std::span<Value> v) {
    if (v[0] < N) v[0] = static_cast<Value>(mul_mod(v[0], am, N));
  };
  auto inv = [ai, N](std::span<Value> v) {
    if (v[0] < N) v[0] = static_cast<Value>(mul_mod(v[0], ai, N));
  };
  return make_permutation(layout, {reg}, fwd, inv, "U_" + std::to_string(am) + "," + std::to_string(N) + "(" + reg + ")");
}

GateOp cond_mod_exp(const RegisterLayout& layout, const ModExpParams& params, const std::vector<std::string>& regs) {
  const Int a = params.a, b = params.b, L = params.L;
  switch (params.kind) {
    case ModExpKind::two_reg: {
      if (regs.size() != 2) throw std::invalid_argument("cond_mod_exp two_reg: expected 2 registers");
      require_fits(layout, regs[1], L);
      if (gcd(mod(a, L), L) != 1) throw std::invalid_argument("cond_mod_exp two_reg: a must be coprime to L");
      Int ai = inverse_mod(a, L);
      auto fwd = [a, L](std::span<Value> v) {
        if (v[1] < L) v[1] = static_cast<Value>(mul_mod(v[1], pow_mod(a, v[0], L), L));
      };
      auto inv = [ai, L](std::span<Value> v) {
        if (v[1] < L) v[1] = static_cast<Value>(mul_mod(v[1], pow_mod(ai, v[0], L), L));
      };
      return make_permutation(layout, regs, fwd, inv, "U^c_" + std::to_string(a) + "," + std::to_string(L) + "(" + join(regs) + ")");
    }
    case ModExpKind::three_reg: {
      if (regs.size() != 3) throw std::invalid_argument("cond_mod_exp three_reg: expected 3 registers");
      return make_compute(
          layout, {regs[0], regs[1]}, regs[2],
          [a, L](std::span<const Value> v) { return mul_mod(v[1], pow_mod(a, v[0], L), L); }, L,
          "U^c3_" + std::to_string(a) + "," + std::to_string(L) + "(" + join(regs) + ")");
    }
    case ModExpKind::two_var: {
      if (regs.size() != 3) throw std::invalid_argument("cond_mod_exp two_var: expected 3 registers");
      return make_compute(
          layout, {regs[0], regs[1]}, regs[2],
          [a, b, L](std::span<const Value> v) { return mul_mod(pow_mod(b, v[0], L), pow_mod(a, v[1], L), L); }, L,
          "U_f[" + std::to_string(b) + "^x " + std::to_string(a) + "^y mod " + std::to_string(L) + "](" + join(regs) + ")");
    }
  }
  throw std::invalid_argument("cond_mod_exp: unknown variant");
}

GateOp cyclic_shift(const RegisterLayout& layout, const CyclicGroupSpec& spec, Int h, Int t, const std::string& reg,
                    std::optional<std::string> control) {
  const Int p = spec.p;
  if (mod(h, p) == 0) throw std::invalid_argument("cyclic_shift: h = 0 mod p");
  const Int ord = multiplicative_order(h, p);
  const Int e = mod(t, ord);
  if (!control) {
    Int f = pow_mod(h, e, p), fi = inverse_mod(f, p);
    auto fwd = [f, p](std::span<Value> v) {
      if (v[0] >= 1 && v[0] < p) v[0] = static_cast<Value>(mul_mod(v[0], f, p));
    };
    auto inv = [fi, p](std::span<Value> v) {
      if (v[0] >= 1 && v[0] < p) v[0] = static_cast<Value>(mul_mod(v[0], fi, p));
    };
    return make_permutation(layout, {reg}, fwd, inv,
                            "U_" + std::to_string(h) + "^" + std::to_string(t) + "(" + reg + ")");
  }
  Int hi = inverse_mod(h, p);
  auto fwd = [h, e, ord, p](std::span<Value> v) {
    if (v[1] >= 1 && v[1] < p) v[1] = static_cast<Value>(mul_mod(v[1], pow_mod(h, mul_mod(v[0], e, ord), p), p));
  };
  auto inv = [hi, e, ord, p](std::span<Value> v) {
    if (v[1] >= 1 && v[1] < p) v[1] = static_cast<Value>(mul_mod(v[1], pow_mod(hi, mul_mod(v[0], e, ord), p), p));
  };
  return make_permutation(layout, {*control, reg}, fwd, inv,
                          "U^c_" + std::to_string(h) + "^" + std::to_string(t) + "(" + *control + "," + reg + ")");
}

GateOp qft(const RegisterLayout& layout, Int N, const std::string& reg) {
  require_fits(layout, reg, N);
  Eigen::MatrixXcd m(N, N);
  const double norm = 1.0 / std::sqrt(static_cast<double>(N));
  for (Int k = 0; k < N; ++k)
    for (Int l = 0; l < N; ++l) {
      // Reduce k*l first so large arguments do not lose precision.
      double angle = 2.0 * std::numbers::pi * static_cast<double>((k * l) % N) / static_cast<double>(N);
      m(k, l) = std::polar(norm, angle);
    }
  return make_local(layout, reg, m, "QFT_" + std::to_string(N) + "(" + reg + ")", CostClass::qft, true);
}

std::vector<Value> complete_partial_bijection(Value dim, const std::vector<std::pair<Value, Value>>& pairs) {
  std::vector<Value> table(dim);
  std::vector<char> dom(dim, 0), img(dim, 0);
  for (auto [a, b] : pairs) {
    if (a >= dim || b >= dim) throw std::invalid_argument("partial bijection value out of range");
    if (dom[a] || img[b]) throw std::invalid_argument("partial map is not injective");
    dom[a] = img[b] = 1;
    table[a] = b;
  }
  // Free sources are the values outside the domain; free targets are those
  // outside the image. Fixed points are kept, the rest are paired in order.
  std::vector<Value> sources, targets;
  for (Value v = 0; v < dim; ++v) {
    if (!dom[v] && !img[v]) {
      table[v] = v;
      dom[v] = img[v] = 1;
    }
  }
  for (Value v = 0; v < dim; ++v) {
    if (!dom[v]) sources.push_back(v);
    if (!img[v]) targets.push_back(v);
  }
  for (std::size_t i = 0; i < sources.size(); ++i) table[sources[i]] = targets[i];
  return table;
}

GateOp table_permutation(const RegisterLayout& layout, const std::string& reg, std::vector<Value> forward,
                         std::string label, CostClass cost) {
  Value dim = reg_dim(layout, reg);
  if (forward.size() != dim) throw std::invalid_argument("permutation table size mismatch");
  std::vector<Value> inverse(dim, dim);
  for (Value v = 0; v < dim; ++v) {
    if (forward[v] >= dim || inverse[forward[v]] != dim) throw NonBijective("non-bijective permutation table " + label);
    inverse[forward[v]] = v;
  }
  auto f = std::make_shared<const std::vector<Value>>(std::move(forward));
  auto g = std::make_shared<const std::vector<Value>>(std::move(inverse));
  return make_permutation(
      layout, {reg}, [f](std::span<Value> v) { v[0] = (*f)[v[0]]; }, [g](std::span<Value> v) { v[0] = (*g)[v[0]]; },
      std::move(label), cost);
}

GateOp functional_qft(const RegisterLayout& layout, const std::function<Int(Int)>& f, Int r, const std::string& reg) {
  Value dim = reg_dim(layout, reg);
  require_fits(layout, reg, r);
  std::vector<std::pair<Value, Value>> pairs;
  std::set<Int> seen;
  for (Int x = 0; x < r; ++x) {
    Int y = f(x);
    if (y < 0 || y >= static_cast<Int>(dim)) throw std::invalid_argument("functional_qft: f(x) outside register");
    if (!seen.insert(y).second) throw std::invalid_argument("functional_qft: f not injective on Z_r");
    pairs.emplace_back(static_cast<Value>(x), static_cast<Value>(y));
  }
  GateOp relabel = table_permutation(layout, reg, complete_partial_bijection(dim, pairs), "U_f(" + reg + ")");
  std::vector<GateOp> ops{adjoint(relabel), qft(layout, r, reg), relabel};
  return make_sequence(std::move(ops), "QFT_f_" + std::to_string(r) + "(" + reg + ")");
}

}  // namespace cycsim
