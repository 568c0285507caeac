#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cycsim/hilbert.hpp"
#include "cycsim/numtheory.hpp"

namespace cycsim {

// The largest subgroup of Z_p^* and its generator h = g^{M_r}.
struct ProgramConfig {
  std::shared_ptr<const CyclicGroupSpec> group;
  Int m_r = 0;
  Int h = 0;

  static ProgramConfig make(std::shared_ptr<const CyclicGroupSpec> group);
  Int p() const { return group->p; }
  Int f(Int x) const;  // h^x mod p, period m_r
  std::optional<Int> index_of(Int value) const;
  bool in_subspace(Int value) const { return index_of(value).has_value(); }
  // Basis value outside Z_p^+ and 0 that serves as |c>.
  Value control_value() const { return static_cast<Value>(group->p); }
};

// Step i in 1..m_r with x + y + i = 0 mod m_r for the input (x, y), or
// step 1 when g already read |1> and no U_r transposition ever fired.
struct HaltRecord {
  Int step = 0;
  bool direct = false;
  // Value held by the record register: 1..m_r, or m_r + 1 for a direct halt.
  Value code(Int m_r) const { return static_cast<Value>(direct ? m_r + 1 : step); }
};

struct PulseModel {
  double epsilon = 0.0;
  double gamma = 0.0;
  double dt0 = 1.0;  // bookkeeping only
};

struct ProgramRegisters {
  std::string halt = "nh";
  std::string branch = "bh";
  std::string f = "f";
  std::string g = "g";
  std::string record = "rec";
};

struct QpResult {
  SparseState state;
  HaltRecord record;
};

struct QcResult {
  SparseState state;
  HaltRecord record;
  double fidelity = 1.0;  // against the ideal (epsilon = 0) output
  int lock_events = 0;
};

// Controlled transposition |h^x>|h^-x> <-> |h^x>|1>, identity elsewhere.
GateOp u_r_gate(const ProgramConfig& config, const RegisterLayout& layout, const std::string& f, const std::string& g);

class HaltingProgram {
 public:
  HaltingProgram(ProgramConfig config, LayoutPtr layout, ProgramRegisters regs = {});

  // nh(2), bh(m_r + 2), f and g (p + 1), rec(m_r + 2).
  static LayoutPtr make_layout(const ProgramConfig& config);
  SparseState input(Int x, Int y) const;
  SparseState ideal_output(Int x, const HaltRecord& record) const;

  const ProgramConfig& config() const { return config_; }
  const LayoutPtr& layout() const { return layout_; }
  const ProgramRegisters& registers() const { return regs_; }

  GateOp u_r() const;
  GateOp u_r_controlled() const;
  GateOp u_g() const;
  GateOp u_b() const;
  GateOp u_h() const;
  GateOp p_c() const;
  GateOp trigger() const;
  GateOp lock(const PulseModel& pulse) const;

  // Both reject anything but a single basis input.
  QpResult run_qp(const SparseState& state, GateLedger* ledger = nullptr) const;
  QcResult run_qc(const SparseState& state, const PulseModel& pulse, GateLedger* ledger = nullptr) const;

 private:
  struct Start {
    Int x = 0;
    std::optional<Int> y;  // empty when g already reads 0
  };
  Start check_input(const SparseState& state, const char* who) const;
  Value value(const SparseState& state, const std::string& reg) const;

  ProgramConfig config_;
  LayoutPtr layout_;
  ProgramRegisters regs_;
  GateOp u_r_, u_rc_, u_g_, u_b_, u_h_, p_c_, trigger_;
};

struct StripEntry {
  std::size_t pair = 0;  // component index that was removed
  HaltRecord record;
};

struct StripResult {
  SparseState state;
  std::vector<StripEntry> ledger;
  double fidelity = 1.0;  // product of per-pair pulse fidelities
};

// Removes every component register except `keep` from a basis state.
// The layout needs "nh", "bh" and "rec<j>" for each removed j.
StripResult strip_registers(const SparseState& state, std::size_t keep, const std::vector<std::string>& components,
                            const ProgramConfig& config, const PulseModel& pulse = {}, GateLedger* ledger = nullptr);

}  // namespace cycsim
