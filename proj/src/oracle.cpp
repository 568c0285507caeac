#include "cycsim/oracle.hpp"

namespace cycsim {

BinaryRep binary_rep(std::uint64_t value, int n) {
  if (n < 1 || n > 62) throw std::domain_error("binary_rep: n out of range");
  if (value >= (std::uint64_t{1} << n)) throw std::domain_error("binary_rep: value out of range");
  BinaryRep r{n, std::vector<int>(static_cast<std::size_t>(n))};
  for (int k = 0; k < n; ++k) r.b[static_cast<std::size_t>(k)] = 1 - 2 * static_cast<int>((value >> k) & 1u);
  return r;
}

std::uint64_t rep_value(const BinaryRep& rep) {
  if (static_cast<int>(rep.b.size()) != rep.n) throw std::domain_error("rep_value: size mismatch");
  std::uint64_t v = 0;
  for (int k = 0; k < rep.n; ++k) {
    int b = rep.b[static_cast<std::size_t>(k)];
    if (b != 1 && b != -1) throw std::domain_error("rep_value: entries must be +1 or -1");
    v |= static_cast<std::uint64_t>((1 - b) / 2) << k;
  }
  return v;
}

MultiBaseRep multibase_rep(Int s, const CyclicGroupSpec& spec) {
  if (s < 0 || s >= spec.order()) throw std::domain_error("multibase_rep: s out of range");
  MultiBaseRep r;
  r.residues = crt_decompose(s, spec.basis);
  for (std::size_t k = 0; k < r.residues.size(); ++k) {
    const auto& c = spec.basis.components[k];
    r.digits.push_back(multibase_expand(r.residues[k], c.prime, c.exponent));
  }
  return r;
}

Int multibase_value(const MultiBaseRep& rep, const CyclicGroupSpec& spec) {
  std::vector<Int> residues;
  for (std::size_t k = 0; k < rep.digits.size(); ++k) {
    Int v = 0, w = 1;
    for (Int h : rep.digits[k]) {
      v += h * w;
      w *= spec.basis.components[k].prime;
    }
    residues.push_back(v);
  }
  return crt_compose(residues, spec.basis);
}

GateOp selective_rotation(const RegisterLayout& layout, const std::vector<std::string>& regs,
                          const std::vector<Value>& t, double theta, CostClass cost) {
  if (regs.size() != t.size()) throw std::invalid_argument("selective_rotation: target length mismatch");
  for (std::size_t i = 0; i < regs.size(); ++i)
    if (t[i] >= layout[layout.index(regs[i])].dim) throw std::out_of_range("selective_rotation: t out of range");
  std::string label = "C_";
  for (std::size_t i = 0; i < t.size(); ++i) label += (i ? "," : "") + std::to_string(t[i]);
  auto target = t;
  return make_phase(
      layout, regs,
      [target, theta](std::span<const Value> v) {
        return std::equal(v.begin(), v.end(), target.begin()) ? -theta : 0.0;
      },
      label, cost);
}

const char* to_string(OracleFlavor f) {
  switch (f) {
    case OracleFlavor::phase: return "phase";
    case OracleFlavor::flag: return "flag";
    case OracleFlavor::subspace_selective: return "subspace_selective";
  }
  return "?";
}

OracleSpec::OracleSpec(std::shared_ptr<const CyclicGroupSpec> group, Int hidden_s, double theta, OracleFlavor flavor)
    : group_(std::move(group)), s_(hidden_s), theta_(theta), flavor_(flavor) {
  if (!group_) throw std::invalid_argument("OracleSpec: null group");
  if (hidden_s < 0 || hidden_s >= group_->order()) throw std::domain_error("OracleSpec: hidden index out of range");
}

OracleSpec OracleSpec::with_theta(double theta) const { return OracleSpec(group_, s_, theta, flavor_); }

GateOp make_oracle(const OracleSpec& spec, const RegisterLayout& layout, const std::string& work,
                   const std::optional<std::string>& flag) {
  const Value marked = static_cast<Value>(spec.group().power(spec.s_));
  const double theta = spec.theta_;
  switch (spec.flavor_) {
    case OracleFlavor::phase:
      return make_phase(
          layout, {work}, [marked, theta](std::span<const Value> v) { return v[0] == marked ? -theta : 0.0; }, "U_os",
          CostClass::oracle_call);
    case OracleFlavor::flag: {
      if (!flag) throw std::invalid_argument("flag oracle needs a flag register");
      if (layout[layout.index(*flag)].dim != 2) throw std::invalid_argument("flag register must have dimension 2");
      auto toggle = [marked](std::span<Value> v) {
        if (v[0] == marked) v[1] ^= 1u;
      };
      return make_permutation(layout, {work, *flag}, toggle, toggle, "U_os", CostClass::oracle_call);
    }
    case OracleFlavor::subspace_selective: {
      std::vector<std::string> library;
      for (std::size_t i = 0; i < layout.size(); ++i)
        if (layout[i].role == Role::aux) library.push_back(layout[i].name);
      return make_subspace_oracle(spec, layout, work, library);
    }
  }
  throw std::invalid_argument("make_oracle: unknown flavor");
}

GateOp make_subspace_oracle(const OracleSpec& spec, const RegisterLayout& layout, const std::string& work,
                            const std::vector<std::string>& library) {
  const Value marked = static_cast<Value>(spec.group().power(spec.s_));
  const double theta = spec.theta_;
  GateOp phase = make_phase(
      layout, {work}, [marked, theta](std::span<const Value> v) { return v[0] == marked ? -theta : 0.0; }, "U_os",
      CostClass::oracle_call);
  return make_controlled(
      layout, library,
      [](std::span<const Value> v) { return std::all_of(v.begin(), v.end(), [](Value x) { return x == 0; }); },
      std::move(phase), "U_os[R0]");
}

}  // namespace cycsim
