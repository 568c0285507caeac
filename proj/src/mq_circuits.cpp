#include "cycsim/mq_circuits.hpp"

#include <Eigen/SVD>
#include <bit>
#include <cmath>
#include <numbers>

#include "cycsim/gates.hpp"

namespace cycsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDenseCap = 10;
constexpr int kOperatorCap = 12;

int register_qubits(const RegisterLayout& layout, const std::string& reg) {
  Value d = layout[layout.index(reg)].dim;
  if (d < 2 || !std::has_single_bit(d)) throw std::invalid_argument("register " + reg + " is not an n-qubit register");
  return std::countr_zero(d);
}

SparseState ground(const LayoutPtr& layout) { return SparseState::basis(layout, BasisTuple(layout->size())); }

double weight_at(const SparseState& st, std::size_t i, Value v) {
  return st.weight([i, v](const BasisTuple& t) { return t[i] == v; });
}

}  // namespace

int search_qubits(Int p) {
  if (p < 2) throw std::domain_error("search_qubits: p < 2");
  return std::bit_width(static_cast<std::uint64_t>(p));
}

SpinConventions::SpinConventions(int n) : n_(n) {
  if (n < 1 || n > kDenseCap) throw std::domain_error("SpinConventions: n out of range");
}

Eigen::MatrixXcd SpinConventions::identity() const { return Eigen::MatrixXcd::Identity(dim(), dim()); }

Eigen::MatrixXcd SpinConventions::single(int k, const Eigen::Matrix2cd& m) const {
  if (k < 1 || k > n_) throw std::out_of_range("qubit index out of range");
  const Eigen::Index d = dim();
  const Eigen::Index bit = Eigen::Index{1} << (k - 1);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    int b = (col & bit) ? 1 : 0;
    for (int a = 0; a < 2; ++a) {
      if (m(a, b) == Amplitude(0)) continue;
      Eigen::Index row = a ? (col | bit) : (col & ~bit);
      out(row, col) += m(a, b);
    }
  }
  return out;
}

Eigen::MatrixXcd SpinConventions::ix(int k) const {
  Eigen::Matrix2cd m;
  m << 0, 0.5, 0.5, 0;
  return single(k, m);
}

Eigen::MatrixXcd SpinConventions::iy(int k) const {
  const Amplitude i(0, 1);
  Eigen::Matrix2cd m;
  m << 0, -0.5 * i, 0.5 * i, 0;
  return single(k, m);
}

Eigen::MatrixXcd SpinConventions::iz(int k) const {
  Eigen::Matrix2cd m;
  m << 0.5, 0, 0, -0.5;
  return single(k, m);
}

Eigen::MatrixXcd SpinConventions::plus(int k) const { return ix(k) + Amplitude(0, 1) * iy(k); }
Eigen::MatrixXcd SpinConventions::minus(int k) const { return ix(k) - Amplitude(0, 1) * iy(k); }

Eigen::MatrixXcd SpinConventions::total_iz() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim(), dim());
  for (int k = 1; k <= n_; ++k) out += iz(k);
  return out;
}

Eigen::MatrixXcd SpinConventions::all_x() const {
  Eigen::MatrixXcd out = identity();
  for (int k = 1; k <= n_; ++k) out = (2.0 * ix(k)) * out;
  return out;
}

Eigen::MatrixXcd SpinConventions::projector(Value t) const {
  if (static_cast<Eigen::Index>(t) >= dim()) throw std::out_of_range("projector: t out of range");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim(), dim());
  out(t, t) = 1.0;
  return out;
}

Eigen::MatrixXcd SpinConventions::selective_rotation(Value t, double theta) const {
  Eigen::MatrixXcd out = identity();
  out(t, t) = std::polar(1.0, -theta);
  return out;
}

SparseOperator q_n_operator(int n, Axis axis) {
  if (n < 1 || n > kOperatorCap) throw std::domain_error("q_n_operator: n out of range");
  const Eigen::Index d = Eigen::Index{1} << n;
  // prod I_k^+ = |0..0><1..1| and prod I_k^- = |1..1><0..0|.
  Amplitude up, down;
  if (axis == Axis::x) {
    up = 0.5;
    down = 0.5;
  } else {
    up = Amplitude(0, -0.5);
    down = Amplitude(0, 0.5);
  }
  SparseOperator q(d, d);
  std::vector<Eigen::Triplet<Amplitude, Eigen::Index>> trips{{0, d - 1, up}, {d - 1, 0, down}};
  q.setFromTriplets(trips.begin(), trips.end());
  return q;
}

Eigen::MatrixXcd u_ny_matrix(int n, double theta) {
  if (n < 1 || n > kDenseCap) throw std::domain_error("u_ny_matrix: n out of range");
  const Eigen::Index d = Eigen::Index{1} << n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
  u(0, 0) = std::cos(theta);
  u(d - 1, 0) = std::sin(theta);
  u(0, d - 1) = -std::sin(theta);
  u(d - 1, d - 1) = std::cos(theta);
  return u;
}

double operator_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a - b);
  return svd.singularValues()(0);
}

GateOp u_ny_exact(const RegisterLayout& layout, const std::string& reg, double theta) {
  const int n = register_qubits(layout, reg);
  const Value top = (Value{1} << n) - 1;
  Eigen::Matrix2cd m;
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  std::string label = "U_ny(" + std::to_string(theta) + ")";
  if (top == 1) return make_local(layout, reg, m, label, CostClass::arith, false);
  // Move |1..1> next to |0..0>, rotate the pair, move it back.
  auto swap = [top](std::span<Value> v) {
    if (v[0] == 1)
      v[0] = top;
    else if (v[0] == top)
      v[0] = 1;
  };
  GateOp relabel = make_permutation(layout, {reg}, swap, swap, "SWAP_1," + std::to_string(top));
  return make_sequence({relabel, make_local(layout, reg, m, "R2(" + std::to_string(theta) + ")", CostClass::arith, false),
                        relabel},
                       label);
}

GateOp u_ny_trotter(const RegisterLayout& layout, const std::string& reg, double theta, int m) {
  if (m < 1) throw std::domain_error("u_ny_trotter: m must be >= 1");
  const int n = register_qubits(layout, reg);
  if (n > kDenseCap) throw std::domain_error("u_ny_trotter: register too large for dense G");
  const double phi = kPi / (2.0 * n);
  auto iz = [n](Value v) { return 0.5 * n - static_cast<double>(std::popcount(v)); };
  // exp(+-i phi I_z) is diagonal; make_phase multiplies by exp(i angle).
  GateOp zin = make_phase(layout, {reg}, [phi, iz](std::span<const Value> v) { return -phi * iz(v[0]); }, "exp(-i phi Iz)");
  GateOp zout = make_phase(layout, {reg}, [phi, iz](std::span<const Value> v) { return phi * iz(v[0]); }, "exp(i phi Iz)");
  GateOp c0 = make_phase(layout, {reg}, [](std::span<const Value> v) { return v[0] == 0 ? -kPi : 0.0; }, "C_0(pi)",
                         CostClass::reflection);
  // G = exp(-i theta X / (2m)) with X^2 = I.
  const Eigen::Index d = Eigen::Index{1} << n;
  const double a = theta / (2.0 * m);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(d, d) * std::cos(a);
  for (Eigen::Index v = 0; v < d; ++v) g(v ^ (d - 1), v) += Amplitude(0, -std::sin(a));
  GateOp G = make_local(layout, reg, g, "G");
  GateOp Gi = adjoint(G);
  GateOp c0i = adjoint(c0);
  std::vector<GateOp> ops{zin};
  for (int i = 0; i < m; ++i) {
    ops.push_back(Gi);
    ops.push_back(c0i);
    ops.push_back(G);
    ops.push_back(c0);
  }
  ops.push_back(zout);
  return make_sequence(std::move(ops), "U_ny_trotter(m=" + std::to_string(m) + ")");
}

GateOp u_or(const RegisterLayout& layout, const std::string& reg, const BinaryRep& rep) {
  const int n = register_qubits(layout, reg);
  if (rep.n != n) throw std::invalid_argument("u_or: representation width differs from register");
  // Per qubit exp(i pi I_x / 2) exp(-i pi b_k I_x / 2): identity for b_k = 1,
  // i X for b_k = -1.
  Value mask = static_cast<Value>(rep_value(rep));
  const int flips = std::popcount(mask);
  auto fn = [mask](std::span<Value> v) { v[0] ^= mask; };
  GateOp perm = make_permutation(layout, {reg}, fn, fn, "XOR_" + std::to_string(mask));
  const double phase = (kPi / 2.0) * flips;
  GateOp global = make_phase(layout, {reg}, [phase](std::span<const Value>) { return phase; }, "i^" + std::to_string(flips));
  return make_sequence({perm, global}, "U_or(" + std::to_string(mask) + ")");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::non_member: return "non_member";
    case Verdict::is_zero: return "is_zero";
    case Verdict::is_Nminus1: return "is_Nminus1";
    case Verdict::undefined: return "undefined";
  }
  return "?";
}

TransitionReport membership_circuit(const LayoutPtr& layout, const std::string& reg, const GateOp& t_rotation,
                                    GateLedger* ledger) {
  const int n = register_qubits(*layout, reg);
  const Value top = (Value{1} << n) - 1;
  GateOp circuit = make_sequence(
      {u_ny_exact(*layout, reg, kPi / 4), t_rotation, u_ny_exact(*layout, reg, -kPi / 4)}, "U_0n");
  auto out = apply(ground(layout), circuit, ledger);
  TransitionReport r;
  r.probability = weight_at(out, layout->index(reg), top);
  r.verdict = r.probability >= 0.5 - 1e-12 ? Verdict::member : Verdict::non_member;
  return r;
}

TransitionReport disambiguate_circuit(const LayoutPtr& layout, const std::string& reg, const GateOp& c0_half,
                                      const GateOp& ct_minus_half, GateLedger* ledger) {
  const int n = register_qubits(*layout, reg);
  const Value top = (Value{1} << n) - 1;
  GateOp circuit = make_sequence(
      {u_ny_exact(*layout, reg, kPi / 4), ct_minus_half, c0_half, u_ny_exact(*layout, reg, -kPi / 4)}, "U_0n'");
  auto out = apply(ground(layout), circuit, ledger);
  const std::size_t i = layout->index(reg);
  TransitionReport r;
  r.probability = weight_at(out, i, top);
  if (r.probability > 1 - 1e-9)
    r.verdict = Verdict::is_Nminus1;
  else if (weight_at(out, i, 0) > 1 - 1e-9)
    r.verdict = Verdict::is_zero;
  else
    r.verdict = Verdict::undefined;
  return r;
}

VerifyResult verify_solution(Value candidate, const OracleFactory& oracle, const LayoutPtr& layout,
                             const std::string& reg, GateLedger* ledger) {
  const int n = register_qubits(*layout, reg);
  GateOp uor = u_or(*layout, reg, binary_rep(candidate, n));
  auto conjugated = [&](double theta) {
    return make_sequence({adjoint(uor), oracle(theta), uor}, "U_or C_s U_or^+");
  };
  GateLedger local;
  VerifyResult v;
  v.membership = membership_circuit(layout, reg, conjugated(kPi), &local);
  if (v.membership.verdict == Verdict::member) {
    GateOp c0 = selective_rotation(*layout, {reg}, {0}, kPi / 2);
    v.disambiguation = disambiguate_circuit(layout, reg, c0, conjugated(-kPi / 2), &local);
    v.accepted = v.disambiguation->verdict == Verdict::is_zero;
  }
  v.oracle_calls = local.count(CostClass::oracle_call);
  if (ledger) ledger->merge(local);
  return v;
}

GateOp search_trial(const LayoutPtr& layout, const std::string& reg, const CyclicGroupSpec& spec, Int x,
                    const GateOp& aux_oracle) {
  const int n = register_qubits(*layout, reg);
  const Int top = (Int{1} << n) - 1;
  GateOp f1 = set_const(*layout, reg, 1, top);
  GateOp shift = cyclic_shift(*layout, spec, spec.largest_generator(), x, reg);
  return make_sequence({u_ny_exact(*layout, reg, kPi / 4), f1, shift, aux_oracle, adjoint(shift), adjoint(f1),
                        u_ny_exact(*layout, reg, -kPi / 4)},
                       "Q(" + std::to_string(x) + ")");
}

SearchResult subspace_search(const GateOp& aux_oracle, const CyclicGroupSpec& spec, const LayoutPtr& layout,
                             const std::string& reg, double threshold, GateLedger* ledger) {
  const int n = register_qubits(*layout, reg);
  const Int top = (Int{1} << n) - 1;
  const Int m_r = spec.largest_order();
  // Ground and highest states must lie outside the subgroup subspace.
  if (top < spec.p) throw ContractViolation("search register too small: |1..1> inside Z_p");
  for (Int x = 0; x < m_r; ++x) {
    Int v = pow_mod(spec.largest_generator(), x, spec.p);
    if (v == 0 || v == top) throw ContractViolation("ground or highest state inside the search space");
  }
  GateLedger local;
  SearchResult r;
  const std::size_t i = layout->index(reg);
  for (Int x = 0; x < m_r; ++x) {
    auto out = apply(ground(layout), search_trial(layout, reg, spec, x, aux_oracle), &local);
    double prob = weight_at(out, i, static_cast<Value>(top));
    r.probabilities.push_back(prob);
    if (prob > r.max_probability) {
      r.max_probability = prob;
      r.s_k = x;
    }
  }
  r.oracle_calls = local.count(CostClass::oracle_call);
  if (ledger) ledger->merge(local);
  if (r.max_probability <= threshold)
    throw PipelineFault("search", "no trial index reached probability above " + std::to_string(threshold));
  return r;
}

}  // namespace cycsim
