#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

namespace cycsim {

using Amplitude = std::complex<double>;
using Value = std::uint32_t;

struct UnknownRegister : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonBijective : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonUnitary : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// A gate was applied to a state outside the domain it was built for.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};
struct PipelineFault : std::runtime_error {
  PipelineFault(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class Role { work, aux, flag, halt, branch, control, record };
const char* to_string(Role r);

struct RegisterSpec {
  std::string name;
  Value dim = 2;
  Role role = Role::aux;
};

class RegisterLayout {
 public:
  std::size_t add(std::string name, Value dim, Role role = Role::aux);
  std::size_t index(std::string_view name) const;
  bool contains(std::string_view name) const;
  const RegisterSpec& operator[](std::size_t i) const { return regs_.at(i); }
  std::size_t size() const { return regs_.size(); }
  std::vector<std::size_t> with_role(Role role) const;
  double log2_dimension() const;

 private:
  std::vector<RegisterSpec> regs_;
};

using LayoutPtr = std::shared_ptr<const RegisterLayout>;

inline constexpr std::size_t kMaxRegisters = 40;

class BasisTuple {
 public:
  BasisTuple() = default;
  explicit BasisTuple(std::size_t n) : n_(static_cast<std::uint8_t>(n)) {
    if (n > kMaxRegisters) throw std::length_error("too many registers");
  }
  BasisTuple(std::initializer_list<Value> values);

  std::size_t size() const { return n_; }
  Value& operator[](std::size_t i) { return v_[i]; }
  Value operator[](std::size_t i) const { return v_[i]; }
  const Value* begin() const { return v_.data(); }
  const Value* end() const { return v_.data() + n_; }
  std::vector<Value> to_vector() const { return {begin(), end()}; }

  friend bool operator==(const BasisTuple& a, const BasisTuple& b) {
    return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
  }
  friend std::strong_ordering operator<=>(const BasisTuple& a, const BasisTuple& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

 private:
  std::array<Value, kMaxRegisters> v_{};
  std::uint8_t n_ = 0;
};

struct Entry {
  BasisTuple basis;
  Amplitude amp;
};

class SparseState {
 public:
  explicit SparseState(LayoutPtr layout, double drop_threshold = 1e-14);

  static SparseState basis(LayoutPtr layout, const BasisTuple& tuple);
  static SparseState basis(LayoutPtr layout, std::initializer_list<std::pair<std::string_view, Value>> values);
  static SparseState from_entries(LayoutPtr layout, std::vector<Entry> entries);

  const RegisterLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  double drop_threshold() const { return drop_threshold_; }
  void set_drop_threshold(double t) { drop_threshold_ = t; }

  // Sorts, merges duplicate tuples in their original order, and prunes.
  void assign(std::vector<Entry> entries);
  double norm_squared() const;
  void normalize();
  Amplitude amplitude(const BasisTuple& tuple) const;
  double weight(const std::function<bool(const BasisTuple&)>& pred) const;
  double weight_outside_zero(std::size_t reg) const;
  bool is_basis_state(double tol = 1e-9) const;
  BasisTuple zero_tuple() const { return BasisTuple(layout_->size()); }

 private:
  LayoutPtr layout_;
  std::vector<Entry> entries_;
  double drop_threshold_;
};

enum class CostClass { arith, qft, oracle_call, reflection };
const char* to_string(CostClass c);

using PermFn = std::function<void(std::span<Value>)>;
using AngleFn = std::function<double(std::span<const Value>)>;
using PredFn = std::function<bool(std::span<const Value>)>;

struct RegRef {
  std::size_t index = 0;
  std::string name;
  Value dim = 0;
};

class GateOp {
 public:
  struct Permutation {
    std::vector<RegRef> regs;
    PermFn forward;
    PermFn inverse;
  };
  // Multiplies each amplitude by exp(i * sign * angle(values)).
  struct Phase {
    std::vector<RegRef> regs;
    AngleFn angle;
    double sign = 1.0;
  };
  // Acts on indices below the matrix size. A strict gate flags support at
  // or above the size, a lenient one leaves it untouched.
  struct Local {
    RegRef reg;
    Eigen::SparseMatrix<Amplitude> matrix;
    bool strict = true;
  };
  struct Controlled {
    std::vector<RegRef> regs;
    PredFn predicate;
    std::shared_ptr<const GateOp> inner;
  };
  struct Sequence {
    std::vector<GateOp> ops;
  };
  using Body = std::variant<Permutation, Phase, Local, Controlled, Sequence>;

  GateOp() : body_(Sequence{}), label_("identity") {}
  GateOp(Body body, std::string label, CostClass cost)
      : body_(std::move(body)), label_(std::move(label)), cost_(cost) {}

  const Body& body() const { return body_; }
  const std::string& label() const { return label_; }
  CostClass cost() const { return cost_; }
  bool is_leaf() const { return !std::holds_alternative<Sequence>(body_); }
  std::vector<std::string> register_names() const;
  // Registers whose values the gate may change.
  std::vector<std::size_t> modified_registers() const;
  std::size_t leaf_count() const;
  void for_each_leaf(const std::function<void(const GateOp&)>& fn) const;

 private:
  Body body_;
  std::string label_;
  CostClass cost_ = CostClass::arith;
};

struct LedgerEntry {
  std::string label;
  std::vector<std::string> registers;
  CostClass cost = CostClass::arith;
  std::uint64_t count = 0;
};

class GateLedger {
 public:
  void record(const GateOp& leaf);
  void merge(const GateLedger& other);
  std::uint64_t count(CostClass c) const { return by_class_[static_cast<std::size_t>(c)]; }
  std::uint64_t total() const;
  const std::map<std::string, LedgerEntry>& entries() const { return entries_; }
  nlohmann::json to_json() const;

 private:
  std::map<std::string, LedgerEntry> entries_;
  std::array<std::uint64_t, 4> by_class_{};
};

GateOp make_permutation(const RegisterLayout& layout, const std::vector<std::string>& regs, PermFn forward,
                        PermFn inverse, std::string label, CostClass cost = CostClass::arith);
GateOp make_phase(const RegisterLayout& layout, const std::vector<std::string>& regs, AngleFn angle,
                  std::string label, CostClass cost = CostClass::arith);
GateOp make_local(const RegisterLayout& layout, const std::string& reg, const Eigen::MatrixXcd& matrix,
                  std::string label, CostClass cost = CostClass::arith, bool strict = true);
GateOp make_controlled(const RegisterLayout& layout, const std::vector<std::string>& regs, PredFn predicate,
                       GateOp inner, std::string label = {});
GateOp make_sequence(std::vector<GateOp> ops, std::string label = "sequence");

// Exhaustive check over the product of the gate's registers. Returns false
// when the product exceeds `limit` and the check was skipped.
bool verify_bijective(const GateOp::Permutation& perm, std::uint64_t limit = std::uint64_t{1} << 20);

GateOp adjoint(const GateOp& gate);
SparseState apply(const SparseState& state, const GateOp& gate, GateLedger* ledger = nullptr);
void apply_in_place(SparseState& state, const GateOp& gate, GateLedger* ledger = nullptr);

Amplitude inner_product(const SparseState& a, const SparseState& b);
double fidelity(const SparseState& a, const SparseState& b);

struct Measurement {
  std::map<Value, double> distribution;
  std::optional<Value> outcome;
  std::optional<SparseState> collapsed;
};
Measurement measure_register(const SparseState& state, std::string_view reg,
                             std::optional<std::uint64_t> seed = std::nullopt);

nlohmann::json to_json(const SparseState& state);

// Small-layout helpers used by tests and the fuzzing suite.
Eigen::MatrixXcd dense_matrix(const GateOp& gate, const LayoutPtr& layout);
SparseState random_state(const LayoutPtr& layout, std::uint64_t seed, std::size_t support,
                         const std::vector<Value>& bounds = {});

// The pool of auxiliary registers that make up the all-zero library state.
class RegisterLibrary {
 public:
  explicit RegisterLibrary(LayoutPtr layout);
  std::size_t acquire(std::string_view name);
  void release(const SparseState& state, std::string_view name, double tol = 1e-8);
  bool in_use(std::string_view name) const;
  // Throws unless every aux register not currently acquired reads 0.
  void check_restored(const SparseState& state, const std::string& stage, double tol = 1e-8) const;

 private:
  LayoutPtr layout_;
  std::vector<bool> in_use_;
};

void require_zero(const SparseState& state, const std::vector<std::string>& regs, const std::string& stage,
                  double tol = 1e-8);

}  // namespace cycsim
