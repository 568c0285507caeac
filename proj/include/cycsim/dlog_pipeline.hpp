#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cycsim/hilbert.hpp"
#include "cycsim/numtheory.hpp"

namespace cycsim {

enum class AmplifyMode { exact, grover };
const char* to_string(AmplifyMode m);

struct AmplificationPlan {
  double w = 0;
  double beta = 0;  // asin(sqrt(w))
  int iterations = 0;
  double phase = 0;  // pi for plain Grover iterations
  double predicted_weight = 0;
};

// Exact mode uses equal phases on both reflections (phase matching) and
// reaches weight 1 in ceil(pi/(4 beta) - 1/2) iterations.
AmplificationPlan plan_amplification(double w, AmplifyMode mode, std::optional<int> grover_m = std::nullopt);

// Reflection phase S(phi) = I + (exp(i phi) - 1) P.
using ReflectionFactory = std::function<GateOp(double phi)>;

// Each iteration applies good(phi) then full(phi).
GateOp amplification_gate(const ReflectionFactory& good, const ReflectionFactory& full, const AmplificationPlan& plan,
                          const std::string& label = "R(m)");
SparseState amplitude_amplify(const SparseState& state, const ReflectionFactory& good, const ReflectionFactory& full,
                              double w, AmplifyMode mode, std::optional<int> grover_m = std::nullopt,
                              GateLedger* ledger = nullptr);

// prep * S_pivot(phi) * prep^dagger, where the pivot is the joint basis value
// `pivot` of `regs`.
GateOp reflect_about(const RegisterLayout& layout, const GateOp& preparation, const std::vector<std::string>& regs,
                     const std::vector<Value>& pivot, double phi = 3.141592653589793);

struct StageRecord {
  std::string label;
  std::optional<double> fidelity;
  std::optional<double> weight;
  std::size_t support = 0;
  std::uint64_t gates = 0;
  std::uint64_t oracle_calls = 0;
};

struct PipelineTrace {
  std::vector<StageRecord> stages;
  double euler_weight = 0;
  double cross_term_weight = 0;
  AmplificationPlan first_round;
  AmplificationPlan second_round;
  nlohmann::json to_json() const;
};

// Registers: "b" holds the group element (work), "out" receives the index,
// the rest form the library and start at 0.
class DlogPipeline {
 public:
  explicit DlogPipeline(std::shared_ptr<const CyclicGroupSpec> spec, AmplifyMode mode = AmplifyMode::exact,
                        std::optional<int> grover_m = std::nullopt);

  const CyclicGroupSpec& spec() const { return *spec_; }
  const LayoutPtr& layout() const { return layout_; }
  AmplifyMode mode() const { return mode_; }
  static const std::vector<std::string>& library_registers();

  SparseState initial_state(Int b) const;
  SparseState target_state(Int b, Int s) const;

  // Stage-level operations.
  SparseState prepare_psi1(Int b, GateLedger* ledger = nullptr) const;
  SparseState to_psi2(const SparseState& psi1, GateLedger* ledger = nullptr) const;
  SparseState euler_filter(const SparseState& psi2, double* good_weight = nullptr, GateLedger* ledger = nullptr) const;

  // Gate builders.
  GateOp psi1_gate() const;
  GateOp psi2_gate() const;
  GateOp euler_gate() const;
  GateOp u_t() const;
  GateOp good_reflection(double phi) const;
  GateOp full_reflection(double phi) const;
  GateOp first_amplification() const;
  GateOp reduce_to_psi7() const;
  GateOp u_t2() const;
  GateOp second_good_reflection(double phi) const;
  GateOp second_full_reflection(double phi) const;
  GateOp second_amplification() const;
  GateOp v_f_inverse() const;
  GateOp v_f() const;
  GateOp u_log() const;

  double good_weight() const;
  const AmplificationPlan& first_plan() const { return plan1_; }
  const AmplificationPlan& second_plan() const { return plan2_; }

  // Runs every stage on |g^s>, comparing against analytic states. The index
  // is recovered classically here for verification only.
  PipelineTrace trace(Int b, GateLedger* ledger = nullptr) const;

 private:
  std::shared_ptr<const CyclicGroupSpec> spec_;
  LayoutPtr layout_;
  AmplifyMode mode_;
  AmplificationPlan plan1_;
  AmplificationPlan plan2_;
  std::shared_ptr<const GateOp> u_t_;
  std::shared_ptr<const GateOp> u_t2_;
};

}  // namespace cycsim
