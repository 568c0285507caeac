#pragma once

#include <cmath>
#include <string>

#include "cycsim/hilbert.hpp"

namespace cycsim::testing {

struct FuzzResult {
  double worst_norm_error = 0;
  double worst_roundtrip_error = 0;
  bool ok(double tol = 1e-10) const { return worst_norm_error <= tol && worst_roundtrip_error <= tol; }
};

// Norm preservation and adjoint round trip on random states confined to
// `bounds` per register (0 means the full register).
inline FuzzResult fuzz_gate(const GateOp& gate, const LayoutPtr& layout, const std::vector<Value>& bounds = {},
                            int trials = 100, std::size_t support = 6) {
  FuzzResult r;
  GateOp inv = adjoint(gate);
  for (int t = 0; t < trials; ++t) {
    auto psi = random_state(layout, 1000 + static_cast<std::uint64_t>(t), support, bounds);
    auto out = apply(psi, gate);
    r.worst_norm_error = std::max(r.worst_norm_error, std::abs(out.norm_squared() - 1.0));
    auto back = apply(out, inv);
    r.worst_roundtrip_error = std::max(r.worst_roundtrip_error, std::abs(1.0 - fidelity(back, psi)));
  }
  return r;
}

}  // namespace cycsim::testing
