#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cycsim/hilbert.hpp"
#include "cycsim/numtheory.hpp"

namespace cycsim {

// b[k-1] = +1 or -1 for bit a_k = 0 or 1; k = 1 is least significant.
struct BinaryRep {
  int n = 0;
  std::vector<int> b;
};

BinaryRep binary_rep(std::uint64_t value, int n);
std::uint64_t rep_value(const BinaryRep& rep);

struct MultiBaseRep {
  std::vector<Int> residues;
  std::vector<std::vector<Int>> digits;
};

MultiBaseRep multibase_rep(Int s, const CyclicGroupSpec& spec);
Int multibase_value(const MultiBaseRep& rep, const CyclicGroupSpec& spec);

// exp(-i theta |t><t|) on the joint basis value t of `regs`.
GateOp selective_rotation(const RegisterLayout& layout, const std::vector<std::string>& regs,
                          const std::vector<Value>& t, double theta, CostClass cost = CostClass::reflection);

enum class OracleFlavor { phase, flag, subspace_selective };
const char* to_string(OracleFlavor f);

class OracleSpec;
GateOp make_oracle(const OracleSpec& spec, const RegisterLayout& layout, const std::string& work,
                   const std::optional<std::string>& flag = std::nullopt);
GateOp make_subspace_oracle(const OracleSpec& spec, const RegisterLayout& layout, const std::string& work,
                            const std::vector<std::string>& library);

// Holds the hidden index. Only the oracle constructors read it; the driver
// reads it once more for the verification section of its report.
class OracleSpec {
 public:
  OracleSpec(std::shared_ptr<const CyclicGroupSpec> group, Int hidden_s, double theta = 3.141592653589793,
             OracleFlavor flavor = OracleFlavor::phase);

  const CyclicGroupSpec& group() const { return *group_; }
  const std::shared_ptr<const CyclicGroupSpec>& group_ptr() const { return group_; }
  double theta() const { return theta_; }
  OracleFlavor flavor() const { return flavor_; }
  OracleSpec with_theta(double theta) const;
  Int reveal_for_verification() const { return s_; }

 private:
  std::shared_ptr<const CyclicGroupSpec> group_;
  Int s_;
  double theta_;
  OracleFlavor flavor_;

  friend GateOp make_oracle(const OracleSpec&, const RegisterLayout&, const std::string&,
                            const std::optional<std::string>&);
  friend GateOp make_subspace_oracle(const OracleSpec&, const RegisterLayout&, const std::string&,
                                     const std::vector<std::string>&);
};

}  // namespace cycsim
