#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cycsim/halting_program.hpp"
#include "cycsim/hilbert.hpp"
#include "cycsim/numtheory.hpp"

namespace cycsim {

// Subgroup of order m_k generated by g^{M_k}; basis[x] = generator^x mod p.
struct SubspaceDescriptor {
  std::size_t k = 0;
  Int generator = 1;
  Int order = 1;
  std::vector<Int> basis;

  static SubspaceDescriptor make(const CyclicGroupSpec& spec, std::size_t k);
  std::optional<Int> index_of(Int value) const;
};

// Index side:  "s" (p-1), "r<k>" (m_k), "q<k>" (p-1), aux "c", "t".
// Group side:  "w" and "c<k>" (p+1), aux "e<k>", "a<k>" (p), plus the
// halting registers "nh", "bh" and "rec<k>" used when stripping.
class CrtReduction {
 public:
  explicit CrtReduction(std::shared_ptr<const CyclicGroupSpec> spec);

  const CyclicGroupSpec& spec() const { return *spec_; }
  const std::shared_ptr<const CyclicGroupSpec>& spec_ptr() const { return spec_; }
  std::size_t components() const { return spec_->basis.components.size(); }
  std::size_t largest() const { return components() - 1; }
  const SubspaceDescriptor& subspace(std::size_t k) const { return subspaces_.at(k); }
  const LayoutPtr& index_layout() const { return index_layout_; }
  const LayoutPtr& group_layout() const { return group_layout_; }
  std::vector<std::string> residue_registers() const;
  std::vector<std::string> scaled_registers() const;
  std::vector<std::string> group_registers() const;
  std::vector<std::string> index_library() const;
  std::vector<std::string> group_library() const;

  SparseState index_state(Int s) const;
  SparseState group_state(Int b) const;

  // Built once in the constructor.
  const GateOp& phi2_gate() const { return phi2_; }
  const GateOp& phi3_gate() const { return phi3_; }
  const GateOp& phi6_gate() const { return phi6_; }
  const GateOp& phi7_gate() const { return phi7_; }
  GateOp lift_gate(std::size_t from, std::size_t to, const std::string& reg) const;

  SparseState index_to_residue_product(const SparseState& state, GateLedger* ledger = nullptr) const;
  SparseState index_to_scaled_product(const SparseState& state, GateLedger* ledger = nullptr) const;
  SparseState group_state_to_subgroup_product(const SparseState& state, GateLedger* ledger = nullptr) const;
  SparseState subspace_lift(const SparseState& state, std::size_t from, std::size_t to, const std::string& reg,
                            GateLedger* ledger = nullptr) const;
  SparseState to_largest_subspace(const SparseState& state, GateLedger* ledger = nullptr) const;

 private:
  std::shared_ptr<const CyclicGroupSpec> spec_;
  std::vector<SubspaceDescriptor> subspaces_;
  LayoutPtr index_layout_;
  LayoutPtr group_layout_;
  GateOp phi2_, phi3_, phi6_, phi7_;

  GateOp build_phi2() const;
  GateOp build_phi3() const;
  GateOp build_phi6() const;
  GateOp build_phi7() const;
};

// For every group element g^z, the value left in the kept register after
// the group-side reduction and stripping, with the pulse fidelity.
struct PreimageMap {
  std::size_t k = 0;
  std::map<Int, std::vector<std::pair<Int, double>>> by_value;  // value -> (z, fidelity)
};
PreimageMap build_preimage_map(const CrtReduction& crt, std::size_t k, const PulseModel& pulse = {});

// Phase exp(-i theta w) on |h^x> of the search register when the base
// oracle marks a group element reducing to it. One oracle call per use.
GateOp make_aux_oracle(const GateOp& base_oracle, const LayoutPtr& base_layout, const std::string& base_work,
                       std::shared_ptr<const PreimageMap> preimages, const CyclicGroupSpec& spec, double theta,
                       const RegisterLayout& search_layout, const std::string& search_reg);

}  // namespace cycsim
