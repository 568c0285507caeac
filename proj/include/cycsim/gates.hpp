#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cycsim/hilbert.hpp"
#include "cycsim/numtheory.hpp"

namespace cycsim {

enum class ArithKind { add, copy, mul3, mod, swap, set };

// add/copy:  regs (x, y), param L.    mul3: regs (x, y, z), param L.
// mod:       regs (s, t), param m.    swap: regs (a, b), param unused.
// set:       regs (t), param j, optional modulus (default: register dim).
GateOp make_arith(const RegisterLayout& layout, ArithKind kind, const std::vector<std::string>& regs, Int param,
                  std::optional<Int> modulus = std::nullopt);

GateOp add_mod(const RegisterLayout& layout, const std::string& x, const std::string& y, Int L);
GateOp copy_gate(const RegisterLayout& layout, const std::string& x, const std::string& y, Int L);
GateOp mul3(const RegisterLayout& layout, const std::string& x, const std::string& y, const std::string& z, Int L);
GateOp mod_gate(const RegisterLayout& layout, const std::string& s, const std::string& t, Int m);
GateOp swap_gate(const RegisterLayout& layout, const std::string& a, const std::string& b);
GateOp set_const(const RegisterLayout& layout, const std::string& t, Int j, std::optional<Int> modulus = std::nullopt);

// target -> (target + fn(sources)) mod L for target < L, identity above.
using ComputeFn = std::function<Int(std::span<const Value>)>;
GateOp make_compute(const RegisterLayout& layout, const std::vector<std::string>& sources, const std::string& target,
                    ComputeFn fn, Int L, std::string label, CostClass cost = CostClass::arith);

GateOp mul_const(const RegisterLayout& layout, Int a, Int N, const std::string& reg);

enum class ModExpKind { two_reg, three_reg, two_var };
struct ModExpParams {
  ModExpKind kind = ModExpKind::two_reg;
  Int a = 0;
  Int b = 0;  // two_var only
  Int L = 0;
};
// two_reg: (x, y) y -> y a^x.  three_reg: (x, y, z) z += y a^x.
// two_var: (x, y, z) z += b^x a^y.  All mod L.
GateOp cond_mod_exp(const RegisterLayout& layout, const ModExpParams& params, const std::vector<std::string>& regs);

// y -> y h^t mod p on 1..p-1. With a control register the exponent is
// control * t.
GateOp cyclic_shift(const RegisterLayout& layout, const CyclicGroupSpec& spec, Int h, Int t, const std::string& reg,
                    std::optional<std::string> control = std::nullopt);

GateOp qft(const RegisterLayout& layout, Int N, const std::string& reg);
GateOp functional_qft(const RegisterLayout& layout, const std::function<Int(Int)>& f, Int r, const std::string& reg);

// Completes an injective partial map on [0, dim) to a full permutation.
// Values outside the map's domain and image stay fixed where possible.
std::vector<Value> complete_partial_bijection(Value dim, const std::vector<std::pair<Value, Value>>& pairs);
GateOp table_permutation(const RegisterLayout& layout, const std::string& reg, std::vector<Value> forward,
                         std::string label, CostClass cost = CostClass::arith);

}  // namespace cycsim
