#include "cycsim/crt_reduction.hpp"

#include <cmath>

#include "cycsim/gates.hpp"

namespace cycsim {

namespace {

std::string idx(const char* prefix, std::size_t k) { return prefix + std::to_string(k); }

}  // namespace

SubspaceDescriptor SubspaceDescriptor::make(const CyclicGroupSpec& spec, std::size_t k) {
  const auto& c = spec.basis.components.at(k);
  SubspaceDescriptor d;
  d.k = k;
  d.generator = spec.subgroup_generators.at(k);
  d.order = c.m;
  Int v = 1;
  for (Int x = 0; x < d.order; ++x) {
    d.basis.push_back(v);
    v = mul_mod(v, d.generator, spec.p);
  }
  if (v != 1) throw std::logic_error("subgroup generator order mismatch");
  return d;
}

std::optional<Int> SubspaceDescriptor::index_of(Int value) const {
  for (std::size_t x = 0; x < basis.size(); ++x)
    if (basis[x] == value) return static_cast<Int>(x);
  return std::nullopt;
}

CrtReduction::CrtReduction(std::shared_ptr<const CyclicGroupSpec> spec) : spec_(std::move(spec)) {
  if (!spec_) throw std::invalid_argument("CrtReduction: null spec");
  const Int p = spec_->p;
  const std::size_t r = components();
  for (std::size_t k = 0; k < r; ++k) subspaces_.push_back(SubspaceDescriptor::make(*spec_, k));

  auto il = std::make_shared<RegisterLayout>();
  il->add("s", static_cast<Value>(p - 1), Role::work);
  for (std::size_t k = 0; k < r; ++k) il->add(idx("r", k), static_cast<Value>(subspaces_[k].order), Role::work);
  for (std::size_t k = 0; k < r; ++k) il->add(idx("q", k), static_cast<Value>(p - 1), Role::work);
  il->add("c", static_cast<Value>(p - 1), Role::aux);
  il->add("t", static_cast<Value>(p - 1), Role::aux);
  index_layout_ = il;

  auto gl = std::make_shared<RegisterLayout>();
  gl->add("w", static_cast<Value>(p + 1), Role::work);
  for (std::size_t k = 0; k < r; ++k) gl->add(idx("c", k), static_cast<Value>(p + 1), Role::work);
  for (std::size_t k = 0; k < r; ++k) gl->add(idx("e", k), static_cast<Value>(p), Role::aux);
  for (std::size_t k = 0; k < r; ++k) gl->add(idx("a", k), static_cast<Value>(p), Role::aux);
  const Int m_r = spec_->largest_order();
  gl->add("nh", 2, Role::halt);
  gl->add("bh", static_cast<Value>(m_r + 2), Role::branch);
  for (std::size_t k = 0; k < r; ++k) gl->add(idx("rec", k), static_cast<Value>(m_r + 2), Role::record);
  group_layout_ = gl;

  phi2_ = build_phi2();
  phi3_ = build_phi3();
  phi6_ = build_phi6();
  phi7_ = build_phi7();
}

std::vector<std::string> CrtReduction::residue_registers() const {
  std::vector<std::string> v;
  for (std::size_t k = 0; k < components(); ++k) v.push_back(idx("r", k));
  return v;
}

std::vector<std::string> CrtReduction::scaled_registers() const {
  std::vector<std::string> v;
  for (std::size_t k = 0; k < components(); ++k) v.push_back(idx("q", k));
  return v;
}

std::vector<std::string> CrtReduction::group_registers() const {
  std::vector<std::string> v;
  for (std::size_t k = 0; k < components(); ++k) v.push_back(idx("c", k));
  return v;
}

std::vector<std::string> CrtReduction::index_library() const { return {"c", "t"}; }

std::vector<std::string> CrtReduction::group_library() const {
  std::vector<std::string> v;
  for (std::size_t k = 0; k < components(); ++k) v.push_back(idx("e", k));
  for (std::size_t k = 0; k < components(); ++k) v.push_back(idx("a", k));
  return v;
}

SparseState CrtReduction::index_state(Int s) const {
  if (s < 0 || s >= spec_->order()) throw std::domain_error("index_state: s out of range");
  return SparseState::basis(index_layout_, {{"s", static_cast<Value>(s)}});
}

SparseState CrtReduction::group_state(Int b) const {
  if (b < 1 || b >= spec_->p) throw std::domain_error("group_state: b out of range");
  return SparseState::basis(group_layout_, {{"w", static_cast<Value>(b)}});
}

GateOp CrtReduction::build_phi2() const {
  const auto& l = *index_layout_;
  const Int L = spec_->order();
  std::vector<GateOp> ops;
  for (std::size_t k = 0; k < components(); ++k) ops.push_back(mod_gate(l, "s", idx("r", k), subspaces_[k].order));
  // s = sum n_k M_k (s mod m_k) mod (p-1): subtract each term to clear s.
  for (std::size_t k = 0; k < components(); ++k) {
    const auto& c = spec_->basis.components[k];
    Int coeff = mod(c.n * c.M, L);
    GateOp set = set_const(l, "c", coeff);
    GateOp mul = mul3(l, "c", idx("r", k), "t", L);
    ops.push_back(set);
    ops.push_back(mul);
    ops.push_back(adjoint(add_mod(l, "t", "s", L)));
    ops.push_back(adjoint(mul));
    ops.push_back(adjoint(set));
  }
  return make_sequence(std::move(ops), "Phi2");
}

GateOp CrtReduction::build_phi3() const {
  const auto& l = *index_layout_;
  const Int L = spec_->order();
  std::vector<GateOp> ops{phi2_gate()};
  for (std::size_t k = 0; k < components(); ++k) {
    const auto& c = spec_->basis.components[k];
    GateOp setM = set_const(l, "c", mod(c.M, L));
    ops.push_back(setM);
    ops.push_back(mul3(l, "c", idx("r", k), idx("q", k), L));
    ops.push_back(adjoint(setM));
    // r_k = n_k q_k mod m_k, so the residue register can be cleared.
    GateOp setN = set_const(l, "c", mod(c.n, L));
    GateOp mul = mul3(l, "c", idx("q", k), "t", L);
    ops.push_back(setN);
    ops.push_back(mul);
    ops.push_back(adjoint(mod_gate(l, "t", idx("r", k), c.m)));
    ops.push_back(adjoint(mul));
    ops.push_back(adjoint(setN));
  }
  return make_sequence(std::move(ops), "Phi3");
}

GateOp CrtReduction::build_phi6() const {
  const auto& l = *group_layout_;
  const Int p = spec_->p;
  const std::size_t r = components();
  std::vector<GateOp> ops;
  for (std::size_t k = 0; k < r; ++k) {
    const Int M = spec_->basis.components[k].M;
    ops.push_back(make_compute(
        l, {"w"}, idx("c", k), [M, p](std::span<const Value> v) { return v[0] == 0 ? 0 : pow_mod(v[0], M, p); }, p,
        "EXP_" + std::to_string(M) + "(w," + idx("c", k) + ")"));
  }
  // Rebuild g^s as prod (g_k^{s_k})^{n_k} and subtract it from w.
  std::vector<GateOp> build;
  for (std::size_t k = 0; k < r; ++k) {
    const Int n = spec_->basis.components[k].n;
    build.push_back(make_compute(
        l, {idx("c", k)}, idx("e", k),
        [n, p](std::span<const Value> v) { return v[0] == 0 ? 0 : pow_mod(v[0], n, p); }, p,
        "EXP_" + std::to_string(n) + "(" + idx("c", k) + "," + idx("e", k) + ")"));
  }
  build.push_back(copy_gate(l, "e0", "a0", p));
  for (std::size_t k = 1; k < r; ++k) build.push_back(mul3(l, idx("a", k - 1), idx("e", k), idx("a", k), p));
  for (const auto& g : build) ops.push_back(g);
  ops.push_back(adjoint(copy_gate(l, idx("a", r - 1), "w", p)));
  for (auto it = build.rbegin(); it != build.rend(); ++it) ops.push_back(adjoint(*it));
  return make_sequence(std::move(ops), "Phi6");
}

GateOp CrtReduction::lift_gate(std::size_t from, std::size_t to, const std::string& reg) const {
  const auto& a = subspaces_.at(from);
  const auto& b = subspaces_.at(to);
  if (a.order > b.order) throw std::domain_error("subspace_lift: source order exceeds target order");
  std::vector<std::pair<Value, Value>> pairs;
  for (Int x = 0; x < a.order; ++x)
    pairs.emplace_back(static_cast<Value>(a.basis[static_cast<std::size_t>(x)]),
                       static_cast<Value>(b.basis[static_cast<std::size_t>(x)]));
  const auto& l = *group_layout_;
  return table_permutation(l, reg, complete_partial_bijection(l[l.index(reg)].dim, pairs),
                           "LIFT_" + std::to_string(a.order) + "->" + std::to_string(b.order) + "(" + reg + ")");
}

GateOp CrtReduction::build_phi7() const {
  std::vector<GateOp> ops;
  for (std::size_t k = 0; k + 1 < components(); ++k) ops.push_back(lift_gate(k, largest(), idx("c", k)));
  return make_sequence(std::move(ops), "Phi7");
}

SparseState CrtReduction::index_to_residue_product(const SparseState& state, GateLedger* ledger) const {
  auto out = apply(state, phi2_gate(), ledger);
  require_zero(out, {"s", "c", "t"}, "Phi2");
  return out;
}

SparseState CrtReduction::index_to_scaled_product(const SparseState& state, GateLedger* ledger) const {
  auto out = apply(state, phi3_gate(), ledger);
  auto zero = residue_registers();
  zero.insert(zero.end(), {"s", "c", "t"});
  require_zero(out, zero, "Phi3");
  return out;
}

SparseState CrtReduction::group_state_to_subgroup_product(const SparseState& state, GateLedger* ledger) const {
  const std::size_t iw = group_layout_->index("w");
  for (const auto& e : state.entries())
    if (e.basis[iw] == 0 || e.basis[iw] >= static_cast<Value>(spec_->p))
      throw PipelineFault("Phi6", "work register outside the cyclic group state space");
  auto out = apply(state, phi6_gate(), ledger);
  if (out.weight_outside_zero(iw) > 1e-8) throw PipelineFault("Phi6", "product reconstruction mismatch");
  require_zero(out, group_library(), "Phi6");
  return out;
}

SparseState CrtReduction::subspace_lift(const SparseState& state, std::size_t from, std::size_t to,
                                        const std::string& reg, GateLedger* ledger) const {
  return apply(state, lift_gate(from, to, reg), ledger);
}

SparseState CrtReduction::to_largest_subspace(const SparseState& state, GateLedger* ledger) const {
  for (std::size_t k = 0; k < components(); ++k) {
    const std::size_t i = group_layout_->index(idx("c", k));
    for (const auto& e : state.entries())
      if (!subspaces_[k].index_of(static_cast<Int>(e.basis[i])))
        throw PipelineFault("Phi7", "component " + std::to_string(k) + " outside its subgroup subspace");
  }
  return apply(state, phi7_gate(), ledger);
}

PreimageMap build_preimage_map(const CrtReduction& crt, std::size_t k, const PulseModel& pulse) {
  if (k >= crt.components()) throw std::out_of_range("build_preimage_map: component out of range");
  const auto& spec = crt.spec();
  const GateOp phi6 = crt.phi6_gate();
  const GateOp phi7 = crt.phi7_gate();
  const ProgramConfig config = ProgramConfig::make(crt.spec_ptr());
  const std::size_t ik = crt.group_layout()->index("c" + std::to_string(k));
  PreimageMap map;
  map.k = k;
  for (Int z = 0; z < spec.order(); ++z) {
    auto st = apply(apply(crt.group_state(spec.power(z)), phi6), phi7);
    auto stripped = strip_registers(st, k, crt.group_registers(), config, pulse);
    Int v = static_cast<Int>(stripped.state.entries().front().basis[ik]);
    map.by_value[v].emplace_back(z, stripped.fidelity);
  }
  return map;
}

GateOp make_aux_oracle(const GateOp& base_oracle, const LayoutPtr& base_layout, const std::string& base_work,
                       std::shared_ptr<const PreimageMap> preimages, const CyclicGroupSpec& spec, double theta,
                       const RegisterLayout& search_layout, const std::string& search_reg) {
  if (!preimages) throw std::invalid_argument("make_aux_oracle: null preimage map");
  const std::size_t dim = search_layout[search_layout.index(search_reg)].dim;
  if (dim < static_cast<std::size_t>(spec.p)) throw std::invalid_argument("make_aux_oracle: search register too small");
  // Probes of the base oracle are made lazily, once per search value.
  auto memo = std::make_shared<std::vector<std::optional<double>>>(dim);
  const std::size_t iw = base_layout->index(base_work);
  const Int g = spec.g, p = spec.p;
  auto angle = [=](std::span<const Value> v) -> double {
    auto& slot = (*memo)[v[0]];
    if (slot) return *slot;
    double a = 0.0;
    auto it = preimages->by_value.find(static_cast<Int>(v[0]));
    if (it != preimages->by_value.end()) {
      for (auto [z, w] : it->second) {
        BasisTuple t(base_layout->size());
        t[iw] = static_cast<Value>(pow_mod(g, z, p));
        auto probe = apply(SparseState::basis(base_layout, t), base_oracle);
        const auto& e = probe.entries().front();
        if (probe.support_size() != 1 || e.basis != t || std::abs(e.amp - Amplitude(1.0)) > 1e-9) {
          a = -theta * w;
          break;
        }
      }
    }
    slot = a;
    return a;
  };
  return make_phase(search_layout, {search_reg}, angle, "U_os[" + std::to_string(preimages->k) + "]",
                    CostClass::oracle_call);
}

}  // namespace cycsim
