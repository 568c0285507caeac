#include "cycsim/halting_program.hpp"

#include <cmath>

#include "cycsim/gates.hpp"

namespace cycsim {

ProgramConfig ProgramConfig::make(std::shared_ptr<const CyclicGroupSpec> group) {
  if (!group) throw std::invalid_argument("ProgramConfig: null group");
  ProgramConfig c;
  c.m_r = group->largest_order();
  c.h = group->largest_generator();
  c.group = std::move(group);
  return c;
}

Int ProgramConfig::f(Int x) const { return pow_mod(h, mod(x, m_r), group->p); }

std::optional<Int> ProgramConfig::index_of(Int value) const {
  if (value < 1 || value >= group->p) return std::nullopt;
  Int v = 1;
  for (Int x = 0; x < m_r; ++x) {
    if (v == value) return x;
    v = mul_mod(v, h, group->p);
  }
  return std::nullopt;
}

GateOp u_r_gate(const ProgramConfig& config, const RegisterLayout& layout, const std::string& f, const std::string& g) {
  const Int p = config.p();
  // Precomputed partner table: for f = h^x, partner[f] = h^-x.
  auto partner = std::make_shared<std::vector<Value>>(static_cast<std::size_t>(p), 0);
  for (Int x = 0; x < config.m_r; ++x)
    (*partner)[static_cast<std::size_t>(config.f(x))] = static_cast<Value>(config.f(-x));
  auto fn = [partner, p](std::span<Value> v) {
    if (v[0] < 1 || v[0] >= static_cast<Value>(p)) return;
    Value other = (*partner)[v[0]];
    if (other == 0) return;
    if (v[1] == other)
      v[1] = 1;
    else if (v[1] == 1)
      v[1] = other;
  };
  return make_permutation(layout, {f, g}, fn, fn, "U_r(" + f + "," + g + ")");
}

HaltingProgram::HaltingProgram(ProgramConfig config, LayoutPtr layout, ProgramRegisters regs)
    : config_(std::move(config)), layout_(std::move(layout)), regs_(std::move(regs)) {
  const auto& l = *layout_;
  const Value c = config_.control_value();
  for (const auto* name : {&regs_.f, &regs_.g})
    if (l[l.index(*name)].dim <= c) throw ContractViolation("control value collides with register " + *name);
  if (config_.in_subspace(static_cast<Int>(c))) throw ContractViolation("control value inside the subgroup subspace");
  if (l[l.index(regs_.record)].dim < static_cast<Value>(config_.m_r + 2))
    throw std::invalid_argument("record register too small");

  u_r_ = u_r_gate(config_, l, regs_.f, regs_.g);
  u_rc_ = make_controlled(
      l, {regs_.branch}, [](std::span<const Value> v) { return v[0] == 0; }, u_r_, "U_r^c");
  u_g_ = cyclic_shift(l, *config_.group, config_.h, 1, regs_.f);
  const Value bdim = l[l.index(regs_.branch)].dim;
  u_b_ = make_permutation(
      l, {regs_.g, regs_.branch},
      [bdim](std::span<Value> v) {
        if (v[0] == 1) v[1] = (v[1] + 1) % bdim;
      },
      [bdim](std::span<Value> v) {
        if (v[0] == 1) v[1] = (v[1] + bdim - 1) % bdim;
      },
      "U_b");
  auto uh = [](std::span<Value> v) {
    if (v[1] == 0 && v[0] <= 1) v[0] ^= 1u;
  };
  u_h_ = make_permutation(l, {regs_.g, regs_.halt}, uh, uh, "U_h");
  auto flip = [](std::span<Value> v) {
    if (v[0] <= 1) v[0] ^= 1u;
  };
  p_c_ = make_permutation(l, {regs_.halt}, flip, flip, "P_c");
  auto trig = [c](std::span<Value> v) {
    if (v[0] == 1)
      v[0] = c;
    else if (v[0] == c)
      v[0] = 1;
  };
  trigger_ = make_permutation(l, {regs_.g}, trig, trig, "P_t");
}

LayoutPtr HaltingProgram::make_layout(const ProgramConfig& config) {
  auto l = std::make_shared<RegisterLayout>();
  const Value d = static_cast<Value>(config.p() + 1);
  l->add("nh", 2, Role::halt);
  l->add("bh", static_cast<Value>(config.m_r + 2), Role::branch);
  l->add("f", d, Role::work);
  l->add("g", d, Role::work);
  l->add("rec", static_cast<Value>(config.m_r + 2), Role::record);
  return l;
}

SparseState HaltingProgram::input(Int x, Int y) const {
  BasisTuple t(layout_->size());
  t[layout_->index(regs_.f)] = static_cast<Value>(config_.f(x));
  t[layout_->index(regs_.g)] = static_cast<Value>(config_.f(y));
  return SparseState::basis(layout_, t);
}

SparseState HaltingProgram::ideal_output(Int x, const HaltRecord& record) const {
  BasisTuple t(layout_->size());
  t[layout_->index(regs_.halt)] = 1;
  t[layout_->index(regs_.branch)] = 1;
  t[layout_->index(regs_.f)] = static_cast<Value>(config_.f(x));
  t[layout_->index(regs_.record)] = record.code(config_.m_r);
  return SparseState::basis(layout_, t);
}

GateOp HaltingProgram::u_r() const { return u_r_; }
GateOp HaltingProgram::u_r_controlled() const { return u_rc_; }
GateOp HaltingProgram::u_g() const { return u_g_; }
GateOp HaltingProgram::u_b() const { return u_b_; }
GateOp HaltingProgram::u_h() const { return u_h_; }
GateOp HaltingProgram::p_c() const { return p_c_; }
GateOp HaltingProgram::trigger() const { return trigger_; }

GateOp HaltingProgram::lock(const PulseModel& pulse) const {
  if (!(pulse.epsilon >= 0.0 && pulse.epsilon < 1.0)) throw std::domain_error("pulse epsilon must lie in [0, 1)");
  const auto& l = *layout_;
  const Value d = l[l.index(regs_.g)].dim;
  const Value c = config_.control_value();
  const double s = std::sqrt(1.0 - pulse.epsilon * pulse.epsilon);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(d, d);
  m(c, c) = pulse.epsilon;
  m(0, c) = std::polar(s, -pulse.gamma);
  m(c, 0) = -std::polar(s, pulse.gamma);
  m(0, 0) = pulse.epsilon;
  return make_local(l, regs_.g, m, "P_SL", CostClass::arith, false);
}

Value HaltingProgram::value(const SparseState& state, const std::string& reg) const {
  return state.entries().front().basis[layout_->index(reg)];
}

HaltingProgram::Start HaltingProgram::check_input(const SparseState& state, const char* who) const {
  if (state.layout_ptr() != layout_) throw std::invalid_argument(std::string(who) + ": layout mismatch");
  if (state.support_size() != 1 || !state.is_basis_state())
    throw ContractViolation(std::string(who) + ": input must be a single basis state, got support " +
                            std::to_string(state.support_size()));
  for (const auto* name : {&regs_.halt, &regs_.branch, &regs_.record})
    if (value(state, *name) != 0) throw ContractViolation(std::string(who) + ": register " + *name + " must start at 0");
  Start s;
  auto x = config_.index_of(value(state, regs_.f));
  if (!x) throw ContractViolation(std::string(who) + ": f register outside the subgroup subspace");
  s.x = *x;
  Value g = value(state, regs_.g);
  if (g != 0) {
    s.y = config_.index_of(g);
    if (!s.y) throw ContractViolation(std::string(who) + ": g register outside the subgroup subspace");
  }
  return s;
}

QpResult HaltingProgram::run_qp(const SparseState& state, GateLedger* ledger) const {
  Start start = check_input(state, "run_qp");
  SparseState st = state;
  bool halted = false;
  Int record = 0;
  auto check_and_halt = [&] {
    apply_in_place(st, u_b_, ledger);
    if (!halted && value(st, regs_.g) == 1) {
      apply_in_place(st, u_h_, ledger);
      apply_in_place(st, p_c_, ledger);
      halted = true;
    }
  };
  const Int p = config_.p();
  const Int g0 = start.y ? config_.f(*start.y) : 0;
  const bool direct = start.y && *start.y == 0;
  for (Int i = 1; i <= config_.m_r; ++i) {
    check_and_halt();
    apply_in_place(st, u_g_, ledger);
    apply_in_place(st, u_rc_, ledger);
    if (record == 0 && start.y && !direct && mul_mod(value(st, regs_.f), g0, p) == 1) record = i;
  }
  // When x + y = 0 the pairing happens on the last step and only a
  // closing check can fire the halt.
  check_and_halt();
  const HaltRecord rec{direct ? 1 : record, direct};
  if (rec.step > 0) apply_in_place(st, set_const(*layout_, regs_.record, rec.code(config_.m_r)), ledger);
  // Registers outside the program pass through untouched.
  BasisTuple expect = state.entries().front().basis;
  expect[layout_->index(regs_.halt)] = 1;
  expect[layout_->index(regs_.branch)] = 1;
  expect[layout_->index(regs_.g)] = 0;
  expect[layout_->index(regs_.record)] = rec.code(config_.m_r);
  if (start.y && fidelity(st, SparseState::basis(layout_, expect)) < 1.0 - 1e-12)
    throw PipelineFault("Q_p", "program output differs from |1>|1>|f(x)>|0>");
  return {std::move(st), rec};
}

QcResult HaltingProgram::run_qc(const SparseState& state, const PulseModel& pulse, GateLedger* ledger) const {
  Start start = check_input(state, "run_qc");
  const GateOp lk = lock(pulse);
  SparseState st = state;
  int events = 0;
  Int record = 0;
  const Int p = config_.p();
  const Int g0 = start.y ? config_.f(*start.y) : 0;
  const bool direct = start.y && *start.y == 0;
  const std::size_t ig = layout_->index(regs_.g);
  auto any_g_one = [&] {
    for (const auto& e : st.entries())
      if (e.basis[ig] == 1) return true;
    return false;
  };
  auto check_and_lock = [&] {
    apply_in_place(st, u_b_, ledger);
    // The lock only acts once the trigger has moved the system into |c>.
    while (any_g_one()) {
      apply_in_place(st, trigger_, ledger);
      apply_in_place(st, lk, ledger);
      ++events;
    }
  };
  for (Int i = 1; i <= config_.m_r; ++i) {
    check_and_lock();
    apply_in_place(st, u_g_, ledger);
    apply_in_place(st, u_rc_, ledger);
    if (record == 0 && start.y && !direct && mul_mod(value(st, regs_.f), g0, p) == 1) record = i;
  }
  check_and_lock();
  const HaltRecord rec{direct ? 1 : record, direct};
  if (rec.step > 0) apply_in_place(st, set_const(*layout_, regs_.record, rec.code(config_.m_r)), ledger);

  QcResult out{std::move(st), rec, 1.0, events};
  if (pulse.epsilon != 0.0 || pulse.gamma != 0.0) {
    auto ideal = run_qc(state, PulseModel{});
    out.fidelity = fidelity(out.state, ideal.state);
  }
  return out;
}

StripResult strip_registers(const SparseState& state, std::size_t keep, const std::vector<std::string>& components,
                            const ProgramConfig& config, const PulseModel& pulse, GateLedger* ledger) {
  if (keep >= components.size()) throw std::out_of_range("strip_registers: keep index out of range");
  if (state.support_size() != 1 || !state.is_basis_state())
    throw PipelineFault("strip", "non-basis component encountered (support " + std::to_string(state.support_size()) + ")");
  const auto& layout = state.layout_ptr();
  StripResult out{state, {}, 1.0};
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (j == keep) continue;
    HaltingProgram prog(config, layout, {"nh", "bh", components[keep], components[j], "rec" + std::to_string(j)});
    auto r = prog.run_qp(out.state, ledger);
    if (pulse.epsilon != 0.0 || pulse.gamma != 0.0) out.fidelity *= prog.run_qc(out.state, pulse).fidelity;
    out.state = std::move(r.state);
    // Halting and branch registers are returned to 0 for the next pair.
    apply_in_place(out.state, adjoint(set_const(*layout, "nh", 1)), ledger);
    apply_in_place(out.state, adjoint(set_const(*layout, "bh", 1)), ledger);
    out.ledger.push_back({j, r.record});
  }
  require_zero(out.state, {"nh", "bh"}, "strip");
  return out;
}

}  // namespace cycsim
