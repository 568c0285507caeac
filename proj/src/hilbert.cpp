#include "cycsim/hilbert.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace cycsim {

namespace {

constexpr std::uint64_t kDefaultBijectionLimit = std::uint64_t{1} << 20;

std::string toggle_adjoint(const std::string& label) {
  if (label.size() > 5 && label.rfind("adj(", 0) == 0 && label.back() == ')')
    return label.substr(4, label.size() - 5);
  return "adj(" + label + ")";
}

RegRef resolve(const RegisterLayout& layout, const std::string& name) {
  std::size_t i = layout.index(name);
  return {i, name, layout[i].dim};
}

std::vector<RegRef> resolve_all(const RegisterLayout& layout, const std::vector<std::string>& names) {
  std::vector<RegRef> out;
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw std::invalid_argument("register listed twice: " + n);
    out.push_back(resolve(layout, n));
  }
  return out;
}

void check_binding(const RegisterLayout& layout, const RegRef& r) {
  if (r.index >= layout.size() || layout[r.index].name != r.name || layout[r.index].dim != r.dim)
    throw UnknownRegister("unknown register: " + r.name);
}

void check_bindings(const RegisterLayout& layout, const std::vector<RegRef>& regs) {
  for (const auto& r : regs) check_binding(layout, r);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

const char* to_string(Role r) {
  switch (r) {
    case Role::work: return "work";
    case Role::aux: return "aux";
    case Role::flag: return "flag";
    case Role::halt: return "halt";
    case Role::branch: return "branch";
    case Role::control: return "control";
    case Role::record: return "record";
  }
  return "?";
}

const char* to_string(CostClass c) {
  switch (c) {
    case CostClass::arith: return "arith";
    case CostClass::qft: return "qft";
    case CostClass::oracle_call: return "oracle-call";
    case CostClass::reflection: return "reflection";
  }
  return "?";
}

std::size_t RegisterLayout::add(std::string name, Value dim, Role role) {
  if (dim < 2) throw std::invalid_argument("register dimension must be >= 2: " + name);
  if (contains(name)) throw std::invalid_argument("duplicate register name: " + name);
  if (regs_.size() >= kMaxRegisters) throw std::length_error("too many registers");
  regs_.push_back({std::move(name), dim, role});
  return regs_.size() - 1;
}

std::size_t RegisterLayout::index(std::string_view name) const {
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].name == name) return i;
  throw UnknownRegister("unknown register: " + std::string(name));
}

bool RegisterLayout::contains(std::string_view name) const {
  return std::any_of(regs_.begin(), regs_.end(), [&](const RegisterSpec& r) { return r.name == name; });
}

std::vector<std::size_t> RegisterLayout::with_role(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < regs_.size(); ++i)
    if (regs_[i].role == role) out.push_back(i);
  return out;
}

double RegisterLayout::log2_dimension() const {
  double s = 0;
  for (const auto& r : regs_) s += std::log2(static_cast<double>(r.dim));
  return s;
}

BasisTuple::BasisTuple(std::initializer_list<Value> values) : BasisTuple(values.size()) {
  std::copy(values.begin(), values.end(), v_.begin());
}

SparseState::SparseState(LayoutPtr layout, double drop_threshold)
    : layout_(std::move(layout)), drop_threshold_(drop_threshold) {
  if (!layout_) throw std::invalid_argument("null layout");
}

SparseState SparseState::basis(LayoutPtr layout, const BasisTuple& tuple) {
  return from_entries(std::move(layout), {{tuple, Amplitude(1.0, 0.0)}});
}

SparseState SparseState::basis(LayoutPtr layout, std::initializer_list<std::pair<std::string_view, Value>> values) {
  BasisTuple t(layout->size());
  for (const auto& [name, v] : values) t[layout->index(name)] = v;
  return basis(std::move(layout), t);
}

SparseState SparseState::from_entries(LayoutPtr layout, std::vector<Entry> entries) {
  SparseState s(std::move(layout));
  for (const auto& e : entries) {
    if (e.basis.size() != s.layout().size()) throw std::invalid_argument("basis tuple length mismatch");
    for (std::size_t i = 0; i < e.basis.size(); ++i)
      if (e.basis[i] >= s.layout()[i].dim)
        throw std::out_of_range("basis index out of range for register " + s.layout()[i].name);
  }
  s.assign(std::move(entries));
  return s;
}

void SparseState::assign(std::vector<Entry> entries) {
  auto less = [](const Entry& a, const Entry& b) { return a.basis < b.basis; };
  if (!std::is_sorted(entries.begin(), entries.end(), less)) std::stable_sort(entries.begin(), entries.end(), less);
  std::size_t w = 0;
  for (std::size_t r = 0; r < entries.size(); ++r) {
    if (w > 0 && entries[w - 1].basis == entries[r].basis) {
      entries[w - 1].amp += entries[r].amp;
    } else {
      if (w != r) entries[w] = entries[r];
      ++w;
    }
  }
  entries.resize(w);
  std::erase_if(entries, [t = drop_threshold_](const Entry& e) { return std::abs(e.amp) < t; });
  entries_ = std::move(entries);
}

double SparseState::norm_squared() const {
  double s = 0;
  for (const auto& e : entries_) s += std::norm(e.amp);
  return s;
}

void SparseState::normalize() {
  double n = std::sqrt(norm_squared());
  if (n == 0) throw std::domain_error("cannot normalize the zero vector");
  for (auto& e : entries_) e.amp /= n;
}

Amplitude SparseState::amplitude(const BasisTuple& tuple) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), tuple,
                             [](const Entry& e, const BasisTuple& t) { return e.basis < t; });
  if (it != entries_.end() && it->basis == tuple) return it->amp;
  return {0.0, 0.0};
}

double SparseState::weight(const std::function<bool(const BasisTuple&)>& pred) const {
  double s = 0;
  for (const auto& e : entries_)
    if (pred(e.basis)) s += std::norm(e.amp);
  return s;
}

double SparseState::weight_outside_zero(std::size_t reg) const {
  return weight([reg](const BasisTuple& t) { return t[reg] != 0; });
}

bool SparseState::is_basis_state(double tol) const {
  std::size_t big = 0;
  for (const auto& e : entries_)
    if (std::norm(e.amp) > tol) ++big;
  return big == 1;
}

std::vector<std::string> GateOp::register_names() const {
  std::vector<std::string> out;
  auto add = [&](const RegRef& r) {
    if (std::find(out.begin(), out.end(), r.name) == out.end()) out.push_back(r.name);
  };
  std::visit(overloaded{
                 [&](const Permutation& p) { for (const auto& r : p.regs) add(r); },
                 [&](const Phase& p) { for (const auto& r : p.regs) add(r); },
                 [&](const Local& l) { add(l.reg); },
                 [&](const Controlled& c) {
                   for (const auto& r : c.regs) add(r);
                   for (const auto& n : c.inner->register_names())
                     if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
                 },
                 [&](const Sequence& s) {
                   for (const auto& op : s.ops)
                     for (const auto& n : op.register_names())
                       if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
                 },
             },
             body_);
  return out;
}

std::vector<std::size_t> GateOp::modified_registers() const {
  std::vector<std::size_t> out;
  std::visit(overloaded{
                 [&](const Permutation& p) { for (const auto& r : p.regs) out.push_back(r.index); },
                 [&](const Phase&) {},
                 [&](const Local& l) { out.push_back(l.reg.index); },
                 [&](const Controlled& c) { out = c.inner->modified_registers(); },
                 [&](const Sequence& s) {
                   for (const auto& op : s.ops) {
                     auto m = op.modified_registers();
                     out.insert(out.end(), m.begin(), m.end());
                   }
                 },
             },
             body_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void GateOp::for_each_leaf(const std::function<void(const GateOp&)>& fn) const {
  if (const auto* s = std::get_if<Sequence>(&body_)) {
    for (const auto& op : s->ops) op.for_each_leaf(fn);
  } else {
    fn(*this);
  }
}

std::size_t GateOp::leaf_count() const {
  std::size_t n = 0;
  for_each_leaf([&](const GateOp&) { ++n; });
  return n;
}

void GateLedger::record(const GateOp& leaf) {
  std::string key = leaf.label() + "|" + to_string(leaf.cost());
  auto it = entries_.find(key);
  if (it == entries_.end()) it = entries_.emplace(key, LedgerEntry{leaf.label(), leaf.register_names(), leaf.cost(), 0}).first;
  ++it->second.count;
  ++by_class_[static_cast<std::size_t>(leaf.cost())];
}

void GateLedger::merge(const GateLedger& other) {
  for (const auto& [key, e] : other.entries_) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      entries_.emplace(key, e);
    } else {
      it->second.count += e.count;
    }
  }
  for (std::size_t i = 0; i < by_class_.size(); ++i) by_class_[i] += other.by_class_[i];
}

std::uint64_t GateLedger::total() const {
  return std::accumulate(by_class_.begin(), by_class_.end(), std::uint64_t{0});
}

nlohmann::json GateLedger::to_json() const {
  nlohmann::json j;
  nlohmann::json classes = nlohmann::json::object();
  for (auto c : {CostClass::arith, CostClass::qft, CostClass::oracle_call, CostClass::reflection})
    classes[to_string(c)] = count(c);
  j["by_class"] = classes;
  j["total"] = total();
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& [key, e] : entries_)
    gates.push_back({{"label", e.label}, {"registers", e.registers}, {"cost", to_string(e.cost)}, {"count", e.count}});
  j["gates"] = gates;
  return j;
}

bool verify_bijective(const GateOp::Permutation& perm, std::uint64_t limit) {
  std::uint64_t total = 1;
  for (const auto& r : perm.regs) {
    total *= r.dim;
    if (total > limit) return false;
  }
  const std::size_t n = perm.regs.size();
  std::vector<Value> x(n, 0), y(n), z(n);
  for (std::uint64_t step = 0; step < total; ++step) {
    y = x;
    perm.forward(y);
    for (std::size_t i = 0; i < n; ++i)
      if (y[i] >= perm.regs[i].dim) throw NonBijective("non-bijective permutation: image leaves register " + perm.regs[i].name);
    z = y;
    perm.inverse(z);
    if (z != x) throw NonBijective("non-bijective permutation: inverse does not undo forward");
    for (std::size_t i = n; i-- > 0;) {
      if (++x[i] < perm.regs[i].dim) break;
      x[i] = 0;
    }
  }
  return true;
}

GateOp make_permutation(const RegisterLayout& layout, const std::vector<std::string>& regs, PermFn forward,
                        PermFn inverse, std::string label, CostClass cost) {
  GateOp::Permutation p{resolve_all(layout, regs), std::move(forward), std::move(inverse)};
  verify_bijective(p, kDefaultBijectionLimit);
  return GateOp(std::move(p), std::move(label), cost);
}

GateOp make_phase(const RegisterLayout& layout, const std::vector<std::string>& regs, AngleFn angle,
                  std::string label, CostClass cost) {
  return GateOp(GateOp::Phase{resolve_all(layout, regs), std::move(angle), 1.0}, std::move(label), cost);
}

GateOp make_local(const RegisterLayout& layout, const std::string& reg, const Eigen::MatrixXcd& matrix,
                  std::string label, CostClass cost, bool strict) {
  auto ref = resolve(layout, reg);
  if (matrix.rows() != matrix.cols()) throw NonUnitary("local matrix must be square");
  if (matrix.rows() > static_cast<Eigen::Index>(ref.dim))
    throw std::invalid_argument("modulus exceeding register dimension: " + reg);
  Eigen::MatrixXcd err = matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
  if (err.cwiseAbs().maxCoeff() > 1e-10) throw NonUnitary("non-unitary matrix in gate " + label);
  Eigen::SparseMatrix<Amplitude> sm = matrix.sparseView();
  sm.makeCompressed();
  return GateOp(GateOp::Local{ref, std::move(sm), strict}, std::move(label), cost);
}

GateOp make_controlled(const RegisterLayout& layout, const std::vector<std::string>& regs, PredFn predicate,
                       GateOp inner, std::string label) {
  auto refs = resolve_all(layout, regs);
  auto modified = inner.modified_registers();
  for (const auto& r : refs)
    if (std::binary_search(modified.begin(), modified.end(), r.index))
      throw std::invalid_argument("controlled gate modifies its own control register " + r.name);
  if (label.empty()) label = "c-" + inner.label();
  CostClass cost = inner.cost();
  return GateOp(GateOp::Controlled{std::move(refs), std::move(predicate), std::make_shared<const GateOp>(std::move(inner))},
                std::move(label), cost);
}

GateOp make_sequence(std::vector<GateOp> ops, std::string label) {
  return GateOp(GateOp::Sequence{std::move(ops)}, std::move(label), CostClass::arith);
}

GateOp adjoint(const GateOp& gate) {
  std::string label = toggle_adjoint(gate.label());
  return std::visit(overloaded{
                        [&](const GateOp::Permutation& p) {
                          return GateOp(GateOp::Permutation{p.regs, p.inverse, p.forward}, label, gate.cost());
                        },
                        [&](const GateOp::Phase& p) {
                          return GateOp(GateOp::Phase{p.regs, p.angle, -p.sign}, label, gate.cost());
                        },
                        [&](const GateOp::Local& l) {
                          Eigen::SparseMatrix<Amplitude> m = l.matrix.adjoint();
                          m.makeCompressed();
                          return GateOp(GateOp::Local{l.reg, std::move(m), l.strict}, label, gate.cost());
                        },
                        [&](const GateOp::Controlled& c) {
                          return GateOp(GateOp::Controlled{c.regs, c.predicate, std::make_shared<const GateOp>(adjoint(*c.inner))},
                                        label, gate.cost());
                        },
                        [&](const GateOp::Sequence& s) {
                          std::vector<GateOp> ops;
                          ops.reserve(s.ops.size());
                          for (auto it = s.ops.rbegin(); it != s.ops.rend(); ++it) ops.push_back(adjoint(*it));
                          return GateOp(GateOp::Sequence{std::move(ops)}, label, gate.cost());
                        },
                    },
                    gate.body());
}

namespace {

void apply_permutation(SparseState& state, const GateOp::Permutation& p, const std::string& label) {
  check_bindings(state.layout(), p.regs);
  std::vector<Entry> out = state.entries();
  const std::size_t n = p.regs.size();
  std::array<Value, kMaxRegisters> buf{};
  std::span<Value> view(buf.data(), n);
  for (auto& e : out) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = e.basis[p.regs[i].index];
    p.forward(view);
    for (std::size_t i = 0; i < n; ++i) {
      if (buf[i] >= p.regs[i].dim)
        throw NonBijective("non-bijective permutation " + label + ": image leaves register " + p.regs[i].name);
      e.basis[p.regs[i].index] = buf[i];
    }
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.basis < b.basis; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i - 1].basis == out[i].basis) throw NonBijective("non-bijective permutation " + label + ": collision");
  state.assign(std::move(out));
}

void apply_phase(SparseState& state, const GateOp::Phase& p) {
  check_bindings(state.layout(), p.regs);
  std::vector<Entry> out = state.entries();
  const std::size_t n = p.regs.size();
  std::array<Value, kMaxRegisters> buf{};
  for (auto& e : out) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = e.basis[p.regs[i].index];
    double a = p.angle(std::span<const Value>(buf.data(), n));
    if (a != 0.0) e.amp *= std::polar(1.0, p.sign * a);
  }
  state.assign(std::move(out));
}

void apply_local(SparseState& state, const GateOp::Local& l, const std::string& label) {
  check_binding(state.layout(), l.reg);
  const std::size_t r = l.reg.index;
  const auto N = static_cast<Value>(l.matrix.rows());
  const auto& in = state.entries();
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto masked_less = [&](std::size_t a, std::size_t b) {
    const auto& x = in[a].basis;
    const auto& y = in[b].basis;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i == r) continue;
      if (x[i] != y[i]) return x[i] < y[i];
    }
    return x[r] < y[r];
  };
  std::sort(order.begin(), order.end(), masked_less);
  auto same_group = [&](std::size_t a, std::size_t b) {
    const auto& x = in[a].basis;
    const auto& y = in[b].basis;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (i != r && x[i] != y[i]) return false;
    return true;
  };

  std::vector<Entry> out;
  out.reserve(in.size());
  std::vector<Amplitude> acc(N);
  std::vector<char> touched(N, 0);
  const double thr = state.drop_threshold();
  std::size_t g = 0;
  while (g < order.size()) {
    std::size_t h = g;
    while (h < order.size() && same_group(order[g], order[h])) ++h;
    bool any = false;
    for (std::size_t k = g; k < h; ++k) {
      const auto& e = in[order[k]];
      Value v = e.basis[r];
      if (v >= N) {
        if (l.strict) throw ContractViolation("support outside the gate domain for " + label);
        out.push_back(e);
        continue;
      }
      for (Eigen::SparseMatrix<Amplitude>::InnerIterator it(l.matrix, v); it; ++it) {
        acc[it.row()] += it.value() * e.amp;
        touched[it.row()] = 1;
        any = true;
      }
    }
    if (any) {
      BasisTuple key = in[order[g]].basis;
      for (Value k = 0; k < N; ++k) {
        if (!touched[k]) continue;
        if (std::abs(acc[k]) >= thr) {
          key[r] = k;
          out.push_back({key, acc[k]});
        }
        acc[k] = 0;
        touched[k] = 0;
      }
    }
    g = h;
  }
  state.assign(std::move(out));
}

void apply_impl(SparseState& state, const GateOp& gate, GateLedger* ledger);

void apply_controlled(SparseState& state, const GateOp::Controlled& c, GateLedger* ledger) {
  check_bindings(state.layout(), c.regs);
  const std::size_t n = c.regs.size();
  std::array<Value, kMaxRegisters> buf{};
  std::vector<Entry> yes, no;
  for (const auto& e : state.entries()) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = e.basis[c.regs[i].index];
    (c.predicate(std::span<const Value>(buf.data(), n)) ? yes : no).push_back(e);
  }
  if (yes.empty()) return;
  SparseState sub(state.layout_ptr(), state.drop_threshold());
  sub.assign(std::move(yes));
  apply_impl(sub, *c.inner, ledger);
  std::vector<Entry> merged = sub.entries();
  merged.insert(merged.end(), no.begin(), no.end());
  state.assign(std::move(merged));
}

void apply_impl(SparseState& state, const GateOp& gate, GateLedger* ledger) {
  std::visit(overloaded{
                 [&](const GateOp::Permutation& p) { apply_permutation(state, p, gate.label()); },
                 [&](const GateOp::Phase& p) { apply_phase(state, p); },
                 [&](const GateOp::Local& l) { apply_local(state, l, gate.label()); },
                 [&](const GateOp::Controlled& c) { apply_controlled(state, c, nullptr); },
                 [&](const GateOp::Sequence& s) {
                   for (const auto& op : s.ops) apply_impl(state, op, ledger);
                 },
             },
             gate.body());
  if (ledger && gate.is_leaf()) ledger->record(gate);
}

}  // namespace

void apply_in_place(SparseState& state, const GateOp& gate, GateLedger* ledger) { apply_impl(state, gate, ledger); }

SparseState apply(const SparseState& state, const GateOp& gate, GateLedger* ledger) {
  SparseState out = state;
  apply_impl(out, gate, ledger);
  return out;
}

namespace {

void check_same_layout(const SparseState& a, const SparseState& b) {
  if (a.layout_ptr() == b.layout_ptr()) return;
  const auto& x = a.layout();
  const auto& y = b.layout();
  bool same = x.size() == y.size();
  for (std::size_t i = 0; same && i < x.size(); ++i) same = x[i].name == y[i].name && x[i].dim == y[i].dim;
  if (!same) throw std::invalid_argument("layout mismatch");
}

}  // namespace

Amplitude inner_product(const SparseState& a, const SparseState& b) {
  check_same_layout(a, b);
  Amplitude s{0, 0};
  auto i = a.entries().begin(), j = b.entries().begin();
  while (i != a.entries().end() && j != b.entries().end()) {
    if (i->basis < j->basis) {
      ++i;
    } else if (j->basis < i->basis) {
      ++j;
    } else {
      s += std::conj(i->amp) * j->amp;
      ++i;
      ++j;
    }
  }
  return s;
}

double fidelity(const SparseState& a, const SparseState& b) { return std::norm(inner_product(a, b)); }

Measurement measure_register(const SparseState& state, std::string_view reg, std::optional<std::uint64_t> seed) {
  std::size_t r = state.layout().index(reg);
  Measurement m;
  double total = 0;
  for (const auto& e : state.entries()) {
    double w = std::norm(e.amp);
    m.distribution[e.basis[r]] += w;
    total += w;
  }
  if (total <= 0) throw std::domain_error("cannot measure the zero vector");
  for (auto& [v, w] : m.distribution) w /= total;
  if (seed) {
    std::mt19937_64 rng(*seed);
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double cum = 0;
    Value pick = m.distribution.rbegin()->first;
    for (const auto& [v, w] : m.distribution) {
      cum += w;
      if (u < cum) {
        pick = v;
        break;
      }
    }
    m.outcome = pick;
    std::vector<Entry> kept;
    for (const auto& e : state.entries())
      if (e.basis[r] == pick) kept.push_back(e);
    SparseState c(state.layout_ptr(), state.drop_threshold());
    c.assign(std::move(kept));
    c.normalize();
    m.collapsed = std::move(c);
  }
  return m;
}

nlohmann::json to_json(const SparseState& state) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : state.entries())
    arr.push_back({{"basis", e.basis.to_vector()}, {"re", e.amp.real()}, {"im", e.amp.imag()}});
  return arr;
}

Eigen::MatrixXcd dense_matrix(const GateOp& gate, const LayoutPtr& layout) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < layout->size(); ++i) {
    total *= (*layout)[i].dim;
    if (total > 8192) throw std::invalid_argument("dense_matrix: layout too large");
  }
  auto index_of = [&](const BasisTuple& t) {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) idx = idx * (*layout)[i].dim + t[i];
    return static_cast<Eigen::Index>(idx);
  };
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  BasisTuple t(layout->size());
  for (std::uint64_t col = 0; col < total; ++col) {
    SparseState s = apply(SparseState::basis(layout, t), gate);
    for (const auto& e : s.entries()) m(index_of(e.basis), static_cast<Eigen::Index>(col)) = e.amp;
    for (std::size_t i = layout->size(); i-- > 0;) {
      if (++t[i] < (*layout)[i].dim) break;
      t[i] = 0;
    }
  }
  return m;
}

SparseState random_state(const LayoutPtr& layout, std::uint64_t seed, std::size_t support,
                         const std::vector<Value>& bounds) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Entry> entries;
  for (std::size_t k = 0; k < support; ++k) {
    BasisTuple t(layout->size());
    for (std::size_t i = 0; i < layout->size(); ++i) {
      Value bound = i < bounds.size() && bounds[i] > 0 ? bounds[i] : (*layout)[i].dim;
      t[i] = static_cast<Value>(rng() % bound);
    }
    double re = gauss(rng);
    double im = gauss(rng);
    entries.push_back({t, {re, im}});
  }
  SparseState s = SparseState::from_entries(layout, std::move(entries));
  s.normalize();
  return s;
}

RegisterLibrary::RegisterLibrary(LayoutPtr layout) : layout_(std::move(layout)), in_use_(layout_->size(), false) {}

std::size_t RegisterLibrary::acquire(std::string_view name) {
  std::size_t i = layout_->index(name);
  if ((*layout_)[i].role != Role::aux) throw std::invalid_argument("not a library register: " + std::string(name));
  if (in_use_[i]) throw std::logic_error("library register already acquired: " + std::string(name));
  in_use_[i] = true;
  return i;
}

void RegisterLibrary::release(const SparseState& state, std::string_view name, double tol) {
  std::size_t i = layout_->index(name);
  if (!in_use_[i]) throw std::logic_error("library register not acquired: " + std::string(name));
  double w = state.weight_outside_zero(i);
  if (w > tol) throw PipelineFault("release " + std::string(name), "aux register not returned to 0 (weight " + std::to_string(w) + ")");
  in_use_[i] = false;
}

bool RegisterLibrary::in_use(std::string_view name) const { return in_use_[layout_->index(name)]; }

void RegisterLibrary::check_restored(const SparseState& state, const std::string& stage, double tol) const {
  for (std::size_t i = 0; i < layout_->size(); ++i) {
    if ((*layout_)[i].role != Role::aux || in_use_[i]) continue;
    double w = state.weight_outside_zero(i);
    if (w > tol) throw PipelineFault(stage, "aux register " + (*layout_)[i].name + " not returned to 0");
  }
}

void require_zero(const SparseState& state, const std::vector<std::string>& regs, const std::string& stage, double tol) {
  for (const auto& n : regs) {
    double w = state.weight_outside_zero(state.layout().index(n));
    if (w > tol) throw PipelineFault(stage, "aux register " + n + " not returned to 0 (weight " + std::to_string(w) + ")");
  }
}

}  // namespace cycsim
