#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cycsim/hilbert.hpp"
#include "cycsim/numtheory.hpp"
#include "cycsim/oracle.hpp"

namespace cycsim {

// floor(log2 p) + 1, so that p - 1 <= 2^n - 2.
int search_qubits(Int p);

// Spin-1/2 operators on n qubits. Qubit k (1-based) is bit k-1 of the basis
// index and |0> is the +1/2 eigenstate of I_kz.
class SpinConventions {
 public:
  explicit SpinConventions(int n);
  int n() const { return n_; }
  Eigen::Index dim() const { return Eigen::Index{1} << n_; }

  Eigen::MatrixXcd identity() const;
  Eigen::MatrixXcd ix(int k) const;
  Eigen::MatrixXcd iy(int k) const;
  Eigen::MatrixXcd iz(int k) const;
  Eigen::MatrixXcd plus(int k) const;   // I_kx + i I_ky
  Eigen::MatrixXcd minus(int k) const;  // I_kx - i I_ky
  Eigen::MatrixXcd total_iz() const;
  Eigen::MatrixXcd all_x() const;  // 2^n I_1x ... I_nx
  Eigen::MatrixXcd projector(Value t) const;
  Eigen::MatrixXcd selective_rotation(Value t, double theta) const;  // exp(-i theta D_t)

 private:
  Eigen::MatrixXcd single(int k, const Eigen::Matrix2cd& m) const;
  int n_;
};

enum class Axis { x, y };
using SparseOperator = Eigen::SparseMatrix<Amplitude>;

// Q_nx, Q_ny: only <0..0| . |1..1> and its conjugate are nonzero.
SparseOperator q_n_operator(int n, Axis axis);
// exp(-i 2 theta Q_ny) as a dense matrix.
Eigen::MatrixXcd u_ny_matrix(int n, double theta);
double operator_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Gates on a single register of dimension 2^n.
GateOp u_ny_exact(const RegisterLayout& layout, const std::string& reg, double theta);
GateOp u_ny_trotter(const RegisterLayout& layout, const std::string& reg, double theta, int m);
GateOp u_or(const RegisterLayout& layout, const std::string& reg, const BinaryRep& rep);

enum class Verdict { member, non_member, is_zero, is_Nminus1, undefined };
const char* to_string(Verdict v);

struct TransitionReport {
  double probability = 0;  // of |1...1>
  Verdict verdict = Verdict::undefined;
};

TransitionReport membership_circuit(const LayoutPtr& layout, const std::string& reg, const GateOp& t_rotation,
                                    GateLedger* ledger = nullptr);
TransitionReport disambiguate_circuit(const LayoutPtr& layout, const std::string& reg, const GateOp& c0_half,
                                      const GateOp& ct_minus_half, GateLedger* ledger = nullptr);

using OracleFactory = std::function<GateOp(double theta)>;

struct VerifyResult {
  bool accepted = false;
  TransitionReport membership;
  std::optional<TransitionReport> disambiguation;
  std::uint64_t oracle_calls = 0;
};
VerifyResult verify_solution(Value candidate, const OracleFactory& oracle, const LayoutPtr& layout,
                             const std::string& reg, GateLedger* ledger = nullptr);

struct SearchResult {
  Int s_k = -1;
  std::vector<double> probabilities;  // per trial x
  double max_probability = 0;
  std::uint64_t oracle_calls = 0;
};

// Q(x, s_k) = U_ny(-pi/4) F1^+ U_h^-x  aux  U_h^x F1 U_ny(pi/4).
GateOp search_trial(const LayoutPtr& layout, const std::string& reg, const CyclicGroupSpec& spec, Int x,
                    const GateOp& aux_oracle);
SearchResult subspace_search(const GateOp& aux_oracle, const CyclicGroupSpec& spec, const LayoutPtr& layout,
                             const std::string& reg, double threshold = 0.5, GateLedger* ledger = nullptr);

}  // namespace cycsim
