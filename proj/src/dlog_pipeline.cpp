#include "cycsim/dlog_pipeline.hpp"

#include <cmath>
#include <numbers>

#include "cycsim/gates.hpp"

namespace cycsim {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::string> kLibrary = {"x", "y", "f", "sp", "tp", "chk"};
const std::vector<std::string> kPivot = {"out", "x", "y", "f", "sp", "tp", "chk"};

}  // namespace

const char* to_string(AmplifyMode m) { return m == AmplifyMode::exact ? "exact" : "grover"; }

AmplificationPlan plan_amplification(double w, AmplifyMode mode, std::optional<int> grover_m) {
  if (!(w > 0.0) || w > 1.0 + 1e-12) throw std::domain_error("amplification needs a good weight in (0, 1]");
  AmplificationPlan plan;
  plan.w = std::min(w, 1.0);
  plan.beta = std::asin(std::sqrt(plan.w));
  const double x = kPi / (4.0 * plan.beta) - 0.5;
  if (mode == AmplifyMode::grover) {
    plan.iterations = grover_m ? *grover_m : static_cast<int>(std::max(0L, std::lround(x)));
    if (plan.iterations < 0) throw std::domain_error("grover iteration count must be >= 0");
    plan.phase = kPi;
    plan.predicted_weight = std::pow(std::sin((2 * plan.iterations + 1) * plan.beta), 2);
    return plan;
  }
  plan.iterations = std::max(0, static_cast<int>(std::ceil(x - 1e-12)));
  if (plan.iterations == 0) {
    plan.predicted_weight = plan.w;
    return plan;
  }
  double ratio = std::sin(kPi / (4.0 * plan.iterations + 2.0)) / std::sin(plan.beta);
  plan.phase = 2.0 * std::asin(std::min(1.0, ratio));
  plan.predicted_weight = 1.0;
  return plan;
}

GateOp amplification_gate(const ReflectionFactory& good, const ReflectionFactory& full, const AmplificationPlan& plan,
                          const std::string& label) {
  std::vector<GateOp> ops;
  if (plan.iterations > 0) {
    GateOp g = good(plan.phase);
    GateOp f = full(plan.phase);
    for (int i = 0; i < plan.iterations; ++i) {
      ops.push_back(g);
      ops.push_back(f);
    }
  }
  return make_sequence(std::move(ops), label);
}

SparseState amplitude_amplify(const SparseState& state, const ReflectionFactory& good, const ReflectionFactory& full,
                              double w, AmplifyMode mode, std::optional<int> grover_m, GateLedger* ledger) {
  auto plan = plan_amplification(w, mode, grover_m);
  return apply(state, amplification_gate(good, full, plan), ledger);
}

GateOp reflect_about(const RegisterLayout& layout, const GateOp& preparation, const std::vector<std::string>& regs,
                     const std::vector<Value>& pivot, double phi) {
  if (regs.size() != pivot.size()) throw std::invalid_argument("reflect_about: pivot length mismatch");
  auto target = pivot;
  GateOp mark = make_phase(
      layout, regs,
      [target, phi](std::span<const Value> v) { return std::equal(v.begin(), v.end(), target.begin()) ? phi : 0.0; },
      "S_0", CostClass::reflection);
  return make_sequence({adjoint(preparation), mark, preparation}, "reflect(" + preparation.label() + ")");
}

nlohmann::json PipelineTrace::to_json() const {
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : stages) {
    nlohmann::json j{{"label", s.label}, {"support", s.support}, {"gates", s.gates}, {"oracle_calls", s.oracle_calls}};
    j["fidelity"] = s.fidelity ? nlohmann::json(*s.fidelity) : nlohmann::json(nullptr);
    j["weight"] = s.weight ? nlohmann::json(*s.weight) : nlohmann::json(nullptr);
    st.push_back(j);
  }
  auto plan = [](const AmplificationPlan& p) {
    return nlohmann::json{{"w", p.w}, {"iterations", p.iterations}, {"phase", p.phase}, {"predicted_weight", p.predicted_weight}};
  };
  return {{"stages", st},
          {"euler_weight", euler_weight},
          {"cross_term_weight", cross_term_weight},
          {"first_round", plan(first_round)},
          {"second_round", plan(second_round)}};
}

DlogPipeline::DlogPipeline(std::shared_ptr<const CyclicGroupSpec> spec, AmplifyMode mode, std::optional<int> grover_m)
    : spec_(std::move(spec)), mode_(mode) {
  if (!spec_) throw std::invalid_argument("DlogPipeline: null spec");
  const auto p = static_cast<Value>(spec_->p);
  const Value n = p - 1;
  auto l = std::make_shared<RegisterLayout>();
  l->add("b", p, Role::work);
  l->add("out", p, Role::work);
  l->add("x", n);
  l->add("y", n);
  l->add("f", p);
  l->add("sp", n);
  l->add("tp", n);
  l->add("chk", p);
  layout_ = l;
  plan1_ = plan_amplification(good_weight(), mode, grover_m);
  plan2_ = plan_amplification(good_weight(), mode, grover_m);
  u_t_ = std::make_shared<const GateOp>(make_sequence({psi1_gate(), psi2_gate(), euler_gate()}, "U_T"));
  u_t2_ = std::make_shared<const GateOp>(make_sequence({*u_t_, first_amplification(), reduce_to_psi7()}, "U_T2"));
}

const std::vector<std::string>& DlogPipeline::library_registers() { return kLibrary; }

double DlogPipeline::good_weight() const {
  return static_cast<double>(euler_totient(spec_->factorization)) / static_cast<double>(spec_->order());
}

SparseState DlogPipeline::initial_state(Int b) const {
  if (b < 1 || b >= spec_->p) throw std::domain_error("dlog instance b out of range");
  return SparseState::basis(layout_, {{"b", static_cast<Value>(b)}});
}

SparseState DlogPipeline::target_state(Int b, Int s) const {
  return SparseState::basis(layout_, {{"b", static_cast<Value>(b)}, {"out", static_cast<Value>(s)}});
}

GateOp DlogPipeline::psi1_gate() const {
  const Int N = spec_->order(), p = spec_->p, g = spec_->g;
  // f += b^x g^y mod p, with b read from the work register.
  GateOp uf = make_compute(
      *layout_, {"x", "y", "b"}, "f",
      [p, g](std::span<const Value> v) { return mul_mod(pow_mod(v[2], v[0], p), pow_mod(g, v[1], p), p); }, p, "U_f");
  return make_sequence({qft(*layout_, N, "x"), qft(*layout_, N, "y"), uf}, "Psi1");
}

GateOp DlogPipeline::psi2_gate() const {
  const Int N = spec_->order();
  return make_sequence({qft(*layout_, N, "x"), qft(*layout_, N, "y"), swap_gate(*layout_, "x", "y")}, "Psi2");
}

GateOp DlogPipeline::euler_gate() const {
  const Int N = spec_->order();
  const Int e = euler_totient(spec_->factorization) - 1;
  // 0 maps to 0 regardless of the exponent.
  GateOp power = make_compute(
      *layout_, {"x"}, "tp", [N, e](std::span<const Value> v) { return v[0] == 0 ? Int{0} : pow_mod(v[0], e, N); }, N,
      "U^c_phi-1");
  return make_sequence({power, mul3(*layout_, "tp", "y", "sp", N), adjoint(power)}, "Euler");
}

GateOp DlogPipeline::u_t() const { return *u_t_; }

GateOp DlogPipeline::good_reflection(double phi) const {
  const Int p = spec_->p, N = spec_->order();
  const Int ginv = inverse_mod(spec_->g, p);
  GateOp shift = make_compute(
      *layout_, {"b", "sp"}, "chk",
      [p, ginv](std::span<const Value> v) { return mul_mod(v[0], pow_mod(ginv, v[1], p), p); }, p, "U^c_g^-1");
  GateOp mark = make_phase(
      *layout_, {"chk", "x"},
      [phi, N](std::span<const Value> v) { return v[0] == 1 && gcd(v[1], N) == 1 ? phi : 0.0; }, "C_1",
      CostClass::reflection);
  return make_sequence({shift, mark, adjoint(shift)}, "C(Psi3s)");
}

GateOp DlogPipeline::full_reflection(double phi) const {
  return reflect_about(*layout_, *u_t_, kPivot, std::vector<Value>(kPivot.size(), 0), phi);
}

GateOp DlogPipeline::first_amplification() const {
  return amplification_gate([this](double phi) { return good_reflection(phi); },
                            [this](double phi) { return full_reflection(phi); }, plan1_, "R1(m)");
}

GateOp DlogPipeline::reduce_to_psi7() const {
  const Int N = spec_->order(), p = spec_->p;
  return make_sequence({adjoint(mul3(*layout_, "x", "sp", "y", N)), swap_gate(*layout_, "sp", "out"),
                        adjoint(qft(*layout_, N, "x")),
                        adjoint(cond_mod_exp(*layout_, {ModExpKind::two_reg, spec_->g, 0, p}, {"x", "f"}))},
                       "Psi4s->Psi7s");
}

GateOp DlogPipeline::u_t2() const { return *u_t2_; }

GateOp DlogPipeline::second_good_reflection(double phi) const {
  return make_phase(
      *layout_, {"f"}, [phi](std::span<const Value> v) { return v[0] == 1 ? phi : 0.0; }, "C_1(f)",
      CostClass::reflection);
}

GateOp DlogPipeline::second_full_reflection(double phi) const {
  return reflect_about(*layout_, *u_t2_, kPivot, std::vector<Value>(kPivot.size(), 0), phi);
}

GateOp DlogPipeline::second_amplification() const {
  return amplification_gate([this](double phi) { return second_good_reflection(phi); },
                            [this](double phi) { return second_full_reflection(phi); }, plan2_, "R2(m)");
}

GateOp DlogPipeline::v_f_inverse() const {
  const Int N = spec_->order();
  return make_sequence({*u_t2_, second_amplification(), adjoint(qft(*layout_, N, "x")),
                        adjoint(set_const(*layout_, "f", 1))},
                       "V_f^-1");
}

GateOp DlogPipeline::v_f() const {
  const Int p = spec_->p, g = spec_->g;
  return make_compute(
      *layout_, {"b"}, "out", [p, g](std::span<const Value> v) { return pow_mod(g, v[0], p); }, p, "V_f");
}

GateOp DlogPipeline::u_log() const {
  return make_sequence({v_f_inverse(), swap_gate(*layout_, "b", "out"), adjoint(v_f())}, "U_log");
}

SparseState DlogPipeline::prepare_psi1(Int b, GateLedger* ledger) const {
  return apply(initial_state(b), psi1_gate(), ledger);
}

SparseState DlogPipeline::to_psi2(const SparseState& psi1, GateLedger* ledger) const {
  SparseState out = apply(psi1, psi2_gate(), ledger);
  // Every (x, y) pattern must read (l, l c) for one constant c.
  const std::size_t ix = layout_->index("x"), iy = layout_->index("y");
  const Int N = spec_->order();
  std::vector<int> seen(static_cast<std::size_t>(N), -1);
  for (const auto& e : out.entries()) {
    if (std::norm(e.amp) < 1e-20) continue;
    Value l = e.basis[ix];
    if (seen[l] >= 0 && static_cast<Value>(seen[l]) != e.basis[iy])
      throw PipelineFault("Psi2", "first register value paired with two second register values");
    seen[l] = static_cast<int>(e.basis[iy]);
  }
  if (std::count(seen.begin(), seen.end(), -1) != 0) throw PipelineFault("Psi2", "expected p-1 distinct patterns");
  const Int c = seen.size() > 1 ? seen[1] : 0;
  for (Int l = 0; l < N; ++l)
    if (seen[static_cast<std::size_t>(l)] != mul_mod(l, c, N))
      throw PipelineFault("Psi2", "pattern is not of the form (l, l s)");
  return out;
}

SparseState DlogPipeline::euler_filter(const SparseState& psi2, double* good, GateLedger* ledger) const {
  SparseState out = apply(psi2, euler_gate(), ledger);
  if (good) {
    const std::size_t ix = layout_->index("x");
    const Int N = spec_->order();
    *good = out.weight([ix, N](const BasisTuple& t) { return gcd(t[ix], N) == 1; });
  }
  return out;
}

PipelineTrace DlogPipeline::trace(Int b, GateLedger* ledger_out) const {
  const Int p = spec_->p, g = spec_->g, N = spec_->order();
  const Int s = classical_dlog(p, g, b);
  const Int e = euler_totient(spec_->factorization);
  const std::size_t ix = layout_->index("x"), iy = layout_->index("y"), ifr = layout_->index("f"),
                    isp = layout_->index("sp"), ib = layout_->index("b"), iout = layout_->index("out");
  const double two_pi_n = 2.0 * kPi / static_cast<double>(N);

  PipelineTrace tr;
  tr.first_round = plan1_;
  tr.second_round = plan2_;
  GateLedger ledger;
  auto record = [&](const std::string& label, const SparseState& st, std::optional<double> fid,
                    std::optional<double> weight) {
    tr.stages.push_back({label, fid, weight, st.support_size(), ledger.total(), ledger.count(CostClass::oracle_call)});
  };
  auto base = [&]() {
    BasisTuple t(layout_->size());
    t[ib] = static_cast<Value>(b);
    return t;
  };
  auto analytic = [&](std::vector<Entry> entries) {
    SparseState a = SparseState::from_entries(layout_, std::move(entries));
    a.normalize();
    return a;
  };

  SparseState st = initial_state(b);
  record("Psi0", st, 1.0, std::nullopt);

  st = prepare_psi1(b, &ledger);
  {
    std::vector<Entry> es;
    for (Int x = 0; x < N; ++x)
      for (Int y = 0; y < N; ++y) {
        auto t = base();
        t[ix] = static_cast<Value>(x);
        t[iy] = static_cast<Value>(y);
        t[ifr] = static_cast<Value>(mul_mod(pow_mod(b, x, p), pow_mod(g, y, p), p));
        es.push_back({t, 1.0});
      }
    record("Psi1", st, fidelity(st, analytic(es)), std::nullopt);
  }

  st = to_psi2(st, &ledger);
  {
    std::vector<Entry> es;
    for (Int l = 0; l < N; ++l)
      for (Int z = 0; z < N; ++z) {
        auto t = base();
        t[ix] = static_cast<Value>(l);
        t[iy] = static_cast<Value>(mul_mod(l, s, N));
        t[ifr] = static_cast<Value>(pow_mod(g, z, p));
        es.push_back({t, std::polar(1.0, two_pi_n * static_cast<double>((l * z) % N))});
      }
    record("Psi2", st, fidelity(st, analytic(es)), std::nullopt);
  }

  st = euler_filter(st, &tr.euler_weight, &ledger);
  {
    std::vector<Entry> es;
    for (Int l = 0; l < N; ++l)
      for (Int z = 0; z < N; ++z) {
        auto t = base();
        t[ix] = static_cast<Value>(l);
        t[iy] = static_cast<Value>(mul_mod(l, s, N));
        Int lp = l == 0 ? 0 : pow_mod(l, e - 1, N);
        t[isp] = static_cast<Value>(mul_mod(lp, mul_mod(l, s, N), N));
        t[ifr] = static_cast<Value>(pow_mod(g, z, p));
        es.push_back({t, std::polar(1.0, two_pi_n * static_cast<double>((l * z) % N))});
      }
    record("Psi3", st, fidelity(st, analytic(es)), std::nullopt);
  }
  record("Psi3s-weight", st, std::nullopt, tr.euler_weight);

  apply_in_place(st, first_amplification(), &ledger);
  double good1 = st.weight([&](const BasisTuple& t) { return gcd(t[ix], N) == 1 && t[isp] == static_cast<Value>(s); });
  apply_in_place(st, adjoint(mul3(*layout_, "x", "sp", "y", N)), &ledger);
  apply_in_place(st, swap_gate(*layout_, "sp", "out"), &ledger);
  std::vector<Entry> psi4;
  for (Int l = 1; l < N; ++l) {
    if (gcd(l, N) != 1) continue;
    for (Int z = 0; z < N; ++z) {
      auto t = base();
      t[ix] = static_cast<Value>(l);
      t[ifr] = static_cast<Value>(pow_mod(g, z, p));
      t[iout] = static_cast<Value>(s);
      psi4.push_back({t, std::polar(1.0, two_pi_n * static_cast<double>((l * z) % N))});
    }
  }
  if (N == 1 || psi4.empty()) throw PipelineFault("Psi4s", "no coprime components");
  double f4 = fidelity(st, analytic(psi4));
  record("Psi4s", st, f4, good1);
  record("Psi5s", st, f4, good1);

  apply_in_place(st, adjoint(qft(*layout_, N, "x")), &ledger);
  auto h = [&](Int d) {
    Amplitude sum{0, 0};
    for (Int l = 1; l < N; ++l)
      if (gcd(l, N) == 1) sum += std::polar(1.0, two_pi_n * static_cast<double>(mod(l * d, N)));
    return sum;
  };
  {
    std::vector<Entry> es;
    for (Int x = 0; x < N; ++x)
      for (Int z = 0; z < N; ++z) {
        Amplitude c = h(z - x);
        if (std::abs(c) < 1e-12) continue;
        auto t = base();
        t[ix] = static_cast<Value>(x);
        t[ifr] = static_cast<Value>(pow_mod(g, z, p));
        t[iout] = static_cast<Value>(s);
        es.push_back({t, c});
      }
    record("Psi6s", st, fidelity(st, analytic(es)), std::nullopt);
  }

  apply_in_place(st, adjoint(cond_mod_exp(*layout_, {ModExpKind::two_reg, g, 0, p}, {"x", "f"})), &ledger);
  {
    std::vector<Entry> es;
    for (Int x = 0; x < N; ++x)
      for (Int z = 0; z < N; ++z) {
        Amplitude c = h(z - x);
        if (std::abs(c) < 1e-12) continue;
        auto t = base();
        t[ix] = static_cast<Value>(x);
        t[ifr] = static_cast<Value>(pow_mod(g, z - x + N, p));
        t[iout] = static_cast<Value>(s);
        es.push_back({t, c});
      }
    double good2 = st.weight([ifr](const BasisTuple& t) { return t[ifr] == 1; });
    tr.cross_term_weight = 1.0 - good2;
    record("Psi7s", st, fidelity(st, analytic(es)), good2);
  }

  apply_in_place(st, second_amplification(), &ledger);
  apply_in_place(st, adjoint(qft(*layout_, N, "x")), &ledger);
  apply_in_place(st, adjoint(set_const(*layout_, "f", 1)), &ledger);
  record("final", st, fidelity(st, target_state(b, s)), std::nullopt);
  if (ledger_out) ledger_out->merge(ledger);
  return tr;
}

}  // namespace cycsim
