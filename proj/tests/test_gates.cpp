#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cycsim/gates.hpp"
#include "support.hpp"

using namespace cycsim;
using cycsim::testing::fuzz_gate;

namespace {

LayoutPtr layout_of(std::vector<std::pair<std::string, Value>> regs) {
  auto l = std::make_shared<RegisterLayout>();
  for (auto& [n, d] : regs) l->add(n, d);
  return l;
}

BasisTuple run_basis(const LayoutPtr& l, const GateOp& g, BasisTuple in) {
  auto out = apply(SparseState::basis(l, in), g);
  EXPECT_TRUE(out.is_basis_state());
  return out.entries().front().basis;
}

}  // namespace

TEST(Arith, Examples) {
  auto l = layout_of({{"x", 8}, {"y", 8}, {"z", 13}});
  EXPECT_EQ(run_basis(l, add_mod(*l, "x", "y", 5), {3, 4, 0}), (BasisTuple{3, 2, 0}));
  for (Value x = 0; x < 8; ++x) EXPECT_EQ(run_basis(l, copy_gate(*l, "x", "y", 8), {x, 0, 0}), (BasisTuple{x, x, 0}));
  EXPECT_EQ(run_basis(l, mul3(*l, "x", "y", "z", 13), {3, 4, 0}), (BasisTuple{3, 4, 12}));
  EXPECT_EQ(run_basis(l, mod_gate(*l, "z", "x", 3), {0, 0, 7}), (BasisTuple{1, 0, 7}));
  EXPECT_EQ(run_basis(l, swap_gate(*l, "x", "y"), {2, 5, 0}), (BasisTuple{5, 2, 0}));
  EXPECT_EQ(run_basis(l, set_const(*l, "z", 1), {0, 0, 0}), (BasisTuple{0, 0, 1}));
  EXPECT_EQ(run_basis(l, make_arith(*l, ArithKind::add, {"x", "y"}, 5), {3, 4, 0}), (BasisTuple{3, 2, 0}));
  // Identity outside the defined domain.
  EXPECT_EQ(run_basis(l, add_mod(*l, "x", "y", 5), {3, 6, 0}), (BasisTuple{3, 6, 0}));
}

TEST(Arith, CopyAdjointSubtracts) {
  auto l = layout_of({{"x", 6}, {"y", 6}});
  auto c = copy_gate(*l, "x", "y", 6);
  EXPECT_EQ(run_basis(l, adjoint(c), {4, 4}), (BasisTuple{4, 0}));
  EXPECT_EQ(run_basis(l, adjoint(c), {4, 1}), (BasisTuple{4, 3}));
}

TEST(Arith, Errors) {
  auto l = layout_of({{"x", 4}, {"y", 4}});
  EXPECT_THROW(add_mod(*l, "x", "y", 5), std::invalid_argument);
  EXPECT_THROW(set_const(*l, "x", 4), std::invalid_argument);
  EXPECT_THROW(mod_gate(*l, "x", "y", 7), std::invalid_argument);
  EXPECT_THROW(make_arith(*l, ArithKind::mul3, {"x", "y"}, 4), std::invalid_argument);
}

TEST(Arith, AddThenAdjointIsIdentity) {
  auto l = layout_of({{"x", 7}, {"y", 9}});
  auto g = add_mod(*l, "x", "y", 7);
  auto seq = make_sequence({g, adjoint(g)});
  for (Value x = 0; x < 7; ++x)
    for (Value y = 0; y < 9; ++y) EXPECT_EQ(run_basis(l, seq, {x, y}), (BasisTuple{x, y}));
}

TEST(MulConst, Examples) {
  auto l = layout_of({{"r", 8}});
  EXPECT_EQ(run_basis(l, mul_const(*l, 2, 5, "r"), {3}), (BasisTuple{1}));
  EXPECT_EQ(run_basis(l, mul_const(*l, 3, 7, "r"), {5}), (BasisTuple{1}));
  for (Value x = 0; x < 8; ++x) EXPECT_EQ(run_basis(l, mul_const(*l, 1, 7, "r"), {x}), (BasisTuple{x}));
  EXPECT_EQ(run_basis(l, mul_const(*l, 2, 5, "r"), {6}), (BasisTuple{6}));
  EXPECT_THROW(mul_const(*l, 2, 6, "r"), std::invalid_argument);
}

TEST(MulConst, InverseFromBezout) {
  auto l = layout_of({{"r", 13}});
  for (Int a = 1; a < 13; ++a) {
    auto e = extended_gcd(a, 13);
    Int ai = ((e.u % 13) + 13) % 13;
    auto seq = make_sequence({mul_const(*l, a, 13, "r"), mul_const(*l, ai, 13, "r")});
    for (Value x = 0; x < 13; ++x) EXPECT_EQ(run_basis(l, seq, {x}), (BasisTuple{x}));
  }
}

TEST(CondModExp, Examples) {
  auto l = layout_of({{"x", 6}, {"y", 13}, {"z", 13}});
  EXPECT_EQ(run_basis(l, cond_mod_exp(*l, {ModExpKind::two_reg, 2, 0, 5}, {"x", "y"}), {3, 1, 0}), (BasisTuple{3, 3, 0}));
  EXPECT_EQ(run_basis(l, cond_mod_exp(*l, {ModExpKind::three_reg, 2, 0, 6}, {"x", "y", "z"}), {2, 1, 0}),
            (BasisTuple{2, 1, 4}));
  EXPECT_EQ(run_basis(l, cond_mod_exp(*l, {ModExpKind::two_var, 2, 11, 13}, {"x", "y", "z"}), {1, 1, 0}),
            (BasisTuple{1, 1, 9}));
  EXPECT_THROW(cond_mod_exp(*l, {ModExpKind::two_reg, 2, 0, 6}, {"x", "y"}), std::invalid_argument);
}

TEST(CyclicShift, Examples) {
  auto spec = CyclicGroupSpec::make(13);
  auto l = layout_of({{"w", 14}, {"c", 12}});
  auto g = cyclic_shift(*l, spec, 2, 1, "w");
  EXPECT_EQ(run_basis(l, g, {1, 0}), (BasisTuple{2, 0}));
  EXPECT_EQ(run_basis(l, g, {11, 0}), (BasisTuple{9, 0}));
  EXPECT_EQ(run_basis(l, g, {0, 0}), (BasisTuple{0, 0}));
  EXPECT_EQ(run_basis(l, g, {13, 0}), (BasisTuple{13, 0}));
  auto back = cyclic_shift(*l, spec, pow_mod(2, 11, 13), 1, "w");
  for (Value y = 0; y < 14; ++y) EXPECT_EQ(run_basis(l, make_sequence({g, back}), {y, 0}), (BasisTuple{y, 0}));
  std::vector<GateOp> ops(12, g);
  auto full = make_sequence(ops);
  for (Value y = 1; y < 13; ++y) EXPECT_EQ(run_basis(l, full, {y, 0}), (BasisTuple{y, 0}));
  auto cg = cyclic_shift(*l, spec, 2, 1, "w", "c");
  EXPECT_EQ(run_basis(l, cg, {4, 3}), (BasisTuple{6, 3}));  // 2^2 * 2^3 = 2^5 = 6
  EXPECT_THROW(cyclic_shift(*l, spec, 13, 1, "w"), std::invalid_argument);
}

TEST(Qft, Examples) {
  auto l = layout_of({{"q", 3}});
  auto l2 = layout_of({{"q", 2}});
  auto h = apply(SparseState::basis(l2, BasisTuple{0}), qft(*l2, 2, "q"));
  EXPECT_NEAR(std::abs(h.amplitude(BasisTuple{0}) - 1 / std::sqrt(2.0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(h.amplitude(BasisTuple{1}) - 1 / std::sqrt(2.0)), 0, 1e-15);
  auto out = apply(SparseState::basis(l, BasisTuple{1}), qft(*l, 3, "q"));
  for (Value k = 0; k < 3; ++k) {
    Amplitude expect = std::polar(1 / std::sqrt(3.0), 2 * std::numbers::pi * k / 3.0);
    EXPECT_NEAR(std::abs(out.amplitude(BasisTuple{k}) - expect), 0, 1e-14);
  }
  auto q = qft(*l, 3, "q");
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto psi = random_state(l, s, 3);
    EXPECT_NEAR(fidelity(apply(apply(psi, q), adjoint(q)), psi), 1.0, 1e-12);
  }
}

TEST(Qft, SupportOutsideDomainFlagged) {
  auto l = layout_of({{"q", 5}});
  EXPECT_THROW(apply(SparseState::basis(l, BasisTuple{4}), qft(*l, 4, "q")), ContractViolation);
}

TEST(FunctionalQft, IdentityFunctionMatchesQft) {
  auto l = layout_of({{"q", 6}});
  auto a = dense_matrix(functional_qft(*l, [](Int x) { return x; }, 6, "q"), l);
  auto b = dense_matrix(qft(*l, 6, "q"), l);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FunctionalQft, PowerOfTwoModThirteen) {
  auto l = layout_of({{"q", 13}});
  auto g = functional_qft(*l, [](Int x) { return pow_mod(2, x, 13); }, 12, "q");
  auto out = apply(SparseState::basis(l, BasisTuple{1}), g);
  for (Int k = 0; k < 12; ++k)
    EXPECT_NEAR(std::abs(out.amplitude(BasisTuple{static_cast<Value>(pow_mod(2, k, 13))}) - 1 / std::sqrt(12.0)), 0, 1e-13);
  EXPECT_EQ(out.support_size(), 12u);
}

TEST(FunctionalQft, MatchesRelabeledDft) {
  for (Int r = 2; r <= 16; ++r) {
    Value dim = static_cast<Value>(2 * r + 1);
    auto l = layout_of({{"q", dim}});
    auto f = [r](Int x) { return (2 * x + 3) % (2 * r + 1); };
    auto g = functional_qft(*l, f, r, "q");
    // Reference: column f(l) holds the DFT spread over rows f(k).
    for (Int col = 0; col < r; ++col) {
      auto out = apply(SparseState::basis(l, BasisTuple{static_cast<Value>(f(col))}), g);
      EXPECT_EQ(out.support_size(), static_cast<std::size_t>(r));
      for (Int k = 0; k < r; ++k) {
        Amplitude expect = std::polar(1 / std::sqrt(static_cast<double>(r)), 2 * std::numbers::pi * ((k * col) % r) / r);
        ASSERT_NEAR(std::abs(out.amplitude(BasisTuple{static_cast<Value>(f(k))}) - expect), 0, 1e-12) << r;
      }
    }
  }
  auto l = layout_of({{"q", 8}});
  EXPECT_THROW(functional_qft(*l, [](Int x) { return x % 2; }, 4, "q"), std::invalid_argument);
}

TEST(Gates, FuzzNormAndAdjoint) {
  auto spec = CyclicGroupSpec::make(13);
  auto l = layout_of({{"x", 12}, {"y", 12}, {"z", 13}, {"w", 14}});
  std::vector<GateOp> gates = {
      add_mod(*l, "x", "y", 12),
      copy_gate(*l, "x", "y", 12),
      mul3(*l, "x", "y", "z", 13),
      mod_gate(*l, "z", "x", 4),
      swap_gate(*l, "x", "z"),
      set_const(*l, "w", 5),
      mul_const(*l, 5, 12, "y"),
      cond_mod_exp(*l, {ModExpKind::two_reg, 2, 0, 13}, {"x", "z"}),
      cond_mod_exp(*l, {ModExpKind::three_reg, 2, 0, 13}, {"x", "y", "z"}),
      cond_mod_exp(*l, {ModExpKind::two_var, 2, 11, 13}, {"x", "y", "z"}),
      cyclic_shift(*l, spec, 2, 3, "w"),
      cyclic_shift(*l, spec, 2, -1, "w", "x"),
      qft(*l, 12, "x"),
      functional_qft(*l, [](Int x) { return pow_mod(2, x, 13) - 1; }, 12, "w"),
  };
  std::vector<Value> bounds{0, 0, 0, 12};
  for (const auto& g : gates) {
    auto r = fuzz_gate(g, l, bounds);
    EXPECT_TRUE(r.ok()) << g.label() << " " << r.worst_norm_error << " " << r.worst_roundtrip_error;
  }
}
