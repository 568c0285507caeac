#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "cycsim/crt_reduction.hpp"
#include "cycsim/mq_circuits.hpp"
#include "support.hpp"

using namespace cycsim;
using cycsim::testing::fuzz_gate;
using Eigen::MatrixXcd;

namespace {

constexpr double kPi = std::numbers::pi;
const Amplitude kI(0, 1);

LayoutPtr qubits(int n) {
  auto l = std::make_shared<RegisterLayout>();
  l->add("q", Value{1} << n, Role::work);
  return l;
}

MatrixXcd random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Amplitude(nd(rng), nd(rng));
  return (a + a.adjoint()) / 2.0;
}

MatrixXcd diag_exp_iz(const SpinConventions& sc, double phi) {
  MatrixXcd z = sc.total_iz();
  MatrixXcd out = MatrixXcd::Zero(sc.dim(), sc.dim());
  for (Eigen::Index i = 0; i < sc.dim(); ++i) out(i, i) = std::exp(kI * phi * z(i, i).real());
  return out;
}

double prob_top(const SparseState& st) {
  const Value top = st.layout()[0].dim - 1;
  return st.weight([top](const BasisTuple& t) { return t[0] == top; });
}

}  // namespace

TEST(SpinConventions, Relations) {
  for (int n = 1; n <= 4; ++n) {
    SpinConventions sc(n);
    for (int k = 1; k <= n; ++k) {
      MatrixXcd comm = sc.ix(k) * sc.iy(k) - sc.iy(k) * sc.ix(k);
      EXPECT_LT((comm - kI * sc.iz(k)).norm(), 1e-14);
      const Eigen::Index bit = Eigen::Index{1} << (k - 1);
      Eigen::VectorXcd one = Eigen::VectorXcd::Zero(sc.dim()), zero = one;
      one(bit) = 1;
      zero(0) = 1;
      EXPECT_LT((sc.plus(k) * one - zero).norm(), 1e-14);
      EXPECT_LT((sc.plus(k) * zero).norm(), 1e-14);
      EXPECT_LT((sc.minus(k) * zero - one).norm(), 1e-14);
      EXPECT_NEAR(sc.iz(k)(0, 0).real(), 0.5, 1e-15);
    }
  }
  EXPECT_THROW(SpinConventions(0), std::domain_error);
}

TEST(QnOperator, Examples) {
  for (int n = 1; n <= 6; ++n) {
    MatrixXcd qy = MatrixXcd(q_n_operator(n, Axis::y));
    MatrixXcd qx = MatrixXcd(q_n_operator(n, Axis::x));
    const Eigen::Index top = (Eigen::Index{1} << n) - 1;
    EXPECT_LT((qy - qy.adjoint()).norm(), 1e-15);
    EXPECT_LT((qx - qx.adjoint()).norm(), 1e-15);
    EXPECT_NEAR(std::abs(2.0 * qy(top, 0) - kI), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(2.0 * qy(0, top) + kI), 0.0, 1e-15);
    EXPECT_EQ(q_n_operator(n, Axis::y).nonZeros(), 2);
  }
  MatrixXcd q2 = MatrixXcd(q_n_operator(2, Axis::y));
  EXPECT_EQ(q2(1, 2), Amplitude(0));
  EXPECT_THROW(q_n_operator(13, Axis::x), std::domain_error);
}

TEST(QnOperator, CommutatorForm) {
  for (int n = 1; n <= 5; ++n) {
    SpinConventions sc(n);
    MatrixXcd d0 = sc.projector(0), x = sc.all_x();
    MatrixXcd qy = MatrixXcd(q_n_operator(n, Axis::y));
    EXPECT_LT((2.0 * kI * qy - (d0 * x - x * d0)).norm(), 1e-10) << n;
  }
}

TEST(QnOperator, AnticommutatorForm) {
  for (int n = 1; n <= 5; ++n) {
    SpinConventions sc(n);
    const double phi = kPi / (2.0 * n);
    MatrixXcd d0 = sc.projector(0), x = sc.all_x();
    MatrixXcd anti = d0 * x + x * d0;
    MatrixXcd qy = MatrixXcd(q_n_operator(n, Axis::y));
    MatrixXcd rhs = -kI * diag_exp_iz(sc, phi) * anti * diag_exp_iz(sc, -phi);
    EXPECT_LT((2.0 * kI * qy - rhs).norm(), 1e-10) << n;
    EXPECT_LT((MatrixXcd(q_n_operator(n, Axis::x)) - 0.5 * anti).norm(), 1e-10);
  }
}

TEST(SelectiveRotation, ConjugationIdentity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int n = 1; n <= 5; ++n) {
    SpinConventions sc(n);
    std::uniform_int_distribution<Value> pick(0, static_cast<Value>(sc.dim() - 1));
    for (int trial = 0; trial < 100; ++trial) {
      MatrixXcd rho = random_hermitian(sc.dim(), rng);
      const Value t = pick(rng);
      const double th = ang(rng);
      MatrixXcd c = sc.selective_rotation(t, th), d = sc.projector(t);
      MatrixXcd lhs = c * rho * c.adjoint();
      MatrixXcd rhs = rho - (1 - std::cos(th)) * (rho * d + d * rho) + kI * std::sin(th) * (rho * d - d * rho) +
                      2 * (1 - std::cos(th)) * d * rho * d;
      ASSERT_LT((lhs - rhs).norm(), 1e-10);
    }
  }
}

TEST(SelectiveRotation, AnticommutatorFromConjugation) {
  for (int n = 1; n <= 5; ++n) {
    SpinConventions sc(n);
    MatrixXcd x = sc.all_x();
    for (Value t = 0; t < static_cast<Value>(sc.dim()); ++t)
      EXPECT_LT((sc.projector(t) * x * sc.projector(t)).norm(), 1e-14);
    MatrixXcd d0 = sc.projector(0), c0 = sc.selective_rotation(0, kPi);
    EXPECT_LT(((d0 * x + x * d0) - 0.5 * (x - c0 * x * c0.adjoint())).norm(), 1e-10);
  }
}

TEST(UnyExact, MatchesDenseExponential) {
  for (int n = 1; n <= 5; ++n) {
    auto layout = qubits(n);
    for (double th : {0.0, kPi / 4, -kPi / 3, kPi}) {
      MatrixXcd gate = dense_matrix(u_ny_exact(*layout, "q", th), layout);
      EXPECT_LT(operator_distance(gate, u_ny_matrix(n, th)), 1e-12);
      MatrixXcd q = MatrixXcd(q_n_operator(n, Axis::y));
      MatrixXcd direct = (-2.0 * kI * th * q).exp();
      EXPECT_LT(operator_distance(gate, direct), 1e-10);
    }
  }
}

TEST(UnyExact, Examples) {
  auto layout = qubits(3);
  auto psi = apply(SparseState::basis(layout, {{"q", 0}}), u_ny_exact(*layout, "q", kPi / 4));
  EXPECT_NEAR(std::abs(psi.amplitude(BasisTuple{0}) - 1 / std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(psi.amplitude(BasisTuple{7}) - 1 / std::sqrt(2.0)), 0.0, 1e-15);
  auto side = apply(SparseState::basis(layout, {{"q", 5}}), u_ny_exact(*layout, "q", 1.1));
  EXPECT_NEAR(std::abs(side.amplitude(BasisTuple{5}) - 1.0), 0.0, 1e-15);
  EXPECT_TRUE(fuzz_gate(u_ny_exact(*layout, "q", 0.7), layout).ok());
}

TEST(UnyTrotter, ZeroAngleAndPreparation) {
  for (int n = 2; n <= 4; ++n) {
    auto layout = qubits(n);
    for (int m : {1, 4, 16})
      EXPECT_LT(operator_distance(dense_matrix(u_ny_trotter(*layout, "q", 0.0, m), layout),
                                  MatrixXcd::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n)),
                1e-12);
    auto psi = apply(SparseState::basis(layout, {{"q", 0}}), u_ny_trotter(*layout, "q", kPi / 4, 256));
    auto ideal = apply(SparseState::basis(layout, {{"q", 0}}), u_ny_exact(*layout, "q", kPi / 4));
    EXPECT_GE(fidelity(psi, ideal), 0.999);
  }
}

// The two reflection-dressed factors commute, so the product formula has no
// splitting error in this construction.
TEST(UnyTrotter, ProductIsExactToRounding) {
  for (int n = 2; n <= 4; ++n) {
    auto layout = qubits(n);
    for (int m : {4, 8, 16, 32}) {
      double err = operator_distance(dense_matrix(u_ny_trotter(*layout, "q", kPi / 4, m), layout),
                                     u_ny_matrix(n, kPi / 4));
      EXPECT_LT(err, 1e-12) << "n=" << n << " m=" << m;
    }
  }
}

TEST(UOr, Properties) {
  for (int n = 1; n <= 4; ++n) {
    auto layout = qubits(n);
    const Value N = Value{1} << n;
    SpinConventions sc(n);
    EXPECT_LT(operator_distance(dense_matrix(u_or(*layout, "q", binary_rep(0, n)), layout), sc.identity()), 1e-14);
    for (Value s = 0; s < N; ++s)
      for (Value r = 0; r < N; ++r) {
        MatrixXcd u = dense_matrix(u_or(*layout, "q", binary_rep(r, n)), layout);
        MatrixXcd conj = u * sc.selective_rotation(s, 0.9) * u.adjoint();
        ASSERT_LT((conj - sc.selective_rotation(s ^ r, 0.9)).norm(), 1e-12);
      }
  }
  auto layout = qubits(3);
  EXPECT_THROW(u_or(*layout, "q", binary_rep(1, 4)), std::invalid_argument);
}

TEST(MembershipCircuit, TransitionGrid) {
  for (int n = 1; n <= 6; ++n) {
    auto layout = qubits(n);
    const Value N = Value{1} << n;
    for (int j = 0; j < 9; ++j) {
      const double th = -kPi + j * kPi / 4;
      const double expect = (1 - std::cos(th)) / 2;
      for (Value t = 0; t < N; ++t) {
        auto r = membership_circuit(layout, "q", selective_rotation(*layout, {"q"}, {t}, th));
        const bool edge = t == 0 || t == N - 1;
        ASSERT_NEAR(r.probability, edge ? expect : 0.0, 1e-12) << "n=" << n << " t=" << t << " th=" << th;
      }
    }
  }
  auto layout = qubits(3);
  EXPECT_EQ(membership_circuit(layout, "q", selective_rotation(*layout, {"q"}, {0}, kPi)).verdict, Verdict::member);
  EXPECT_EQ(membership_circuit(layout, "q", selective_rotation(*layout, {"q"}, {5}, kPi)).verdict, Verdict::non_member);
  EXPECT_NEAR(membership_circuit(layout, "q", selective_rotation(*layout, {"q"}, {7}, kPi / 2)).probability, 0.5, 1e-12);
}

TEST(DisambiguateCircuit, Verdicts) {
  auto layout = qubits(3);
  auto c0 = selective_rotation(*layout, {"q"}, {0}, kPi / 2);
  auto zero = disambiguate_circuit(layout, "q", c0, selective_rotation(*layout, {"q"}, {0}, -kPi / 2));
  EXPECT_EQ(zero.verdict, Verdict::is_zero);
  auto top = disambiguate_circuit(layout, "q", c0, selective_rotation(*layout, {"q"}, {7}, -kPi / 2));
  EXPECT_EQ(top.verdict, Verdict::is_Nminus1);
  EXPECT_NEAR(top.probability, 1.0, 1e-12);
  auto other = disambiguate_circuit(layout, "q", c0, selective_rotation(*layout, {"q"}, {3}, -kPi / 2));
  EXPECT_EQ(other.verdict, Verdict::undefined);
}

TEST(VerifySolution, Cases) {
  auto spec = std::make_shared<const CyclicGroupSpec>(CyclicGroupSpec::make(13));
  auto layout = qubits(search_qubits(13));
  const Value N = 16;
  for (Int s = 0; s < 12; ++s) {
    OracleSpec hidden(spec, s, kPi);
    OracleFactory f = [&](double th) { return make_oracle(hidden.with_theta(th), *layout, "q"); };
    const Value target = static_cast<Value>(spec->power(s));
    auto good = verify_solution(target, f, layout, "q");
    EXPECT_TRUE(good.accepted);
    EXPECT_LE(good.oracle_calls, 2u);
    auto comp = verify_solution(target ^ (N - 1), f, layout, "q");
    EXPECT_FALSE(comp.accepted);
    ASSERT_TRUE(comp.disambiguation);
    EXPECT_EQ(comp.disambiguation->verdict, Verdict::is_Nminus1);
    for (Value r = 0; r < N; ++r) {
      if (r == target || r == (target ^ (N - 1))) continue;
      auto bad = verify_solution(r, f, layout, "q");
      ASSERT_FALSE(bad.accepted);
      ASSERT_FALSE(bad.disambiguation);
      ASSERT_EQ(bad.oracle_calls, 1u);
    }
  }
}

TEST(SubspaceSearch, FindsComponentIndex) {
  auto spec = std::make_shared<const CyclicGroupSpec>(CyclicGroupSpec::make(13));
  CrtReduction crt(spec);
  auto layout = qubits(search_qubits(13));
  for (Int s : {7, 0, 5}) {
    OracleSpec hidden(spec, s, kPi);
    auto base = make_oracle(hidden, *layout, "q");
    for (std::size_t k = 0; k < crt.components(); ++k) {
      auto pre = std::make_shared<const PreimageMap>(build_preimage_map(crt, k));
      auto aux = make_aux_oracle(base, layout, "q", pre, *spec, kPi, *layout, "q");
      GateLedger ledger;
      auto r = subspace_search(aux, *spec, layout, "q", 0.5, &ledger);
      EXPECT_EQ(r.s_k, s % crt.subspace(k).order) << "s=" << s << " k=" << k;
      EXPECT_LE(r.oracle_calls, 4u);
      EXPECT_EQ(ledger.count(CostClass::oracle_call), r.oracle_calls);
      for (double pr : r.probabilities) EXPECT_TRUE(std::abs(pr) < 1e-12 || std::abs(pr - 1) < 1e-12);
    }
  }
}

TEST(SubspaceSearch, FaultsWithoutMark) {
  auto spec = std::make_shared<const CyclicGroupSpec>(CyclicGroupSpec::make(13));
  auto layout = qubits(4);
  auto none = make_phase(*layout, {"q"}, [](std::span<const Value>) { return 0.0; }, "none", CostClass::oracle_call);
  EXPECT_THROW(subspace_search(none, *spec, layout, "q"), PipelineFault);
  auto small = qubits(3);
  EXPECT_THROW(subspace_search(none, *spec, small, "q"), ContractViolation);
  EXPECT_NEAR(prob_top(apply(SparseState::basis(layout, {{"q", 0}}), search_trial(layout, "q", *spec, 0, none))), 0.0,
              1e-12);
}
