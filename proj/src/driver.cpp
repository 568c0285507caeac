#include "cycsim/driver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "cycsim/crt_reduction.hpp"
#include "cycsim/gates.hpp"
#include "cycsim/mq_circuits.hpp"
#include "cycsim/oracle.hpp"

namespace cycsim {

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

void ExperimentConfig::validate() const {
  if (p < 3 || !is_prime(p)) throw ConfigError("p must be prime");
  if (p > 61) throw ConfigError("p above 61 is outside the simulated range");
  if (g) {
    if (*g <= 0 || *g >= p || multiplicative_order(*g, p) != p - 1) throw ConfigError("g must be a primitive root mod p");
  }
  if (hidden_s && (*hidden_s < 0 || *hidden_s >= p - 1)) throw ConfigError("hidden_s must lie in Z_{p-1}");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");
  if (trotter_m < 1) throw ConfigError("trotter_m must be >= 1");
  if (grover_m && *grover_m < 0) throw ConfigError("grover_m must be >= 0");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"p", p},
                   {"theta", theta},
                   {"mode", cycsim::to_string(mode)},
                   {"trotter_m", trotter_m},
                   {"epsilon", epsilon},
                   {"gamma", gamma},
                   {"seed", seed},
                   {"hidden", hidden_random ? "random" : (hidden_s ? "explicit" : "sweep")},
                   {"trace_dlog", trace_dlog}};
  j["g"] = g ? nlohmann::json(*g) : nlohmann::json(nullptr);
  j["grover_m"] = grover_m ? nlohmann::json(*grover_m) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json comps = nlohmann::json::array();
  std::uint64_t search_calls = 0;
  for (const auto& c : components) {
    comps.push_back({{"k", c.k},
                     {"m", c.m},
                     {"M", c.M},
                     {"n", c.n},
                     {"s_k", c.s_k},
                     {"oracle_calls", c.oracle_calls},
                     {"max_probability", c.max_probability},
                     {"probabilities", c.probabilities}});
    search_calls += c.oracle_calls;
  }
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : stages)
    st.push_back({{"label", s.label}, {"fidelity", opt(s.fidelity)}, {"weight", opt(s.weight)}, {"support", s.support}});
  nlohmann::json halt = nlohmann::json::array();
  for (const auto& h : halting) halt.push_back({{"keep", h.keep}, {"pair", h.pair}, {"step", h.step}, {"direct", h.direct}});

  nlohmann::json j;
  j["config"] = config.to_json();
  j["recovered_s"] = recovered_s ? nlohmann::json(*recovered_s) : nlohmann::json(nullptr);
  j["components"] = comps;
  j["oracle_calls"] = {{"total", gates.count(CostClass::oracle_call)}, {"search", search_calls}};
  j["stages"] = st;
  j["euler_weight"] = opt(euler_weight);
  j["halting_ledger"] = halt;
  j["gate_ledger"] = gates.to_json();
  j["trotter"] = {{"n", trotter_qubits}, {"m", config.trotter_m}, {"theta", 3.141592653589793 / 4}, {"operator_error", trotter_error}};
  j["verification"] = {{"hidden_s", hidden_s},
                       {"classical_dlog", classical_s},
                       {"accepted", verified},
                       {"membership_probability", opt(membership_probability)},
                       {"disambiguation", disambiguation}};
  j["success"] = success;
  if (error_stage) j["error"] = {{"stage", *error_stage}, {"message", error}};
  if (config.timing) j["wall_time_s"] = wall_time;
  return j;
}

std::string ExperimentReport::csv_header() {
  return "hidden_s,recovered_s,success,oracle_calls,components,min_max_probability";
}

std::string ExperimentReport::to_csv_row() const {
  std::ostringstream os;
  os << hidden_s << ',' << (recovered_s ? std::to_string(*recovered_s) : "") << ',' << (success ? "true" : "false")
     << ',' << gates.count(CostClass::oracle_call) << ',';
  double worst = components.empty() ? 0.0 : 1.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    os << (i ? ";" : "") << components[i].s_k;
    worst = std::min(worst, components[i].max_probability);
  }
  nlohmann::json w = worst;
  os << ',' << w.dump();
  return os.str();
}

struct ExperimentContext::Impl {
  std::unique_ptr<CrtReduction> crt;
  std::vector<std::shared_ptr<const PreimageMap>> preimages;
  std::unique_ptr<DlogPipeline> dlog;
  LayoutPtr search_layout;
  int qubits = 0;
  double trotter_error = 0;
};

ExperimentContext::ExperimentContext(const ExperimentConfig& config) : config_(config) {
  config_.validate();
  try {
    spec_ = std::make_shared<const CyclicGroupSpec>(CyclicGroupSpec::make(config_.p, config_.g));
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  auto impl = std::make_shared<Impl>();
  impl->crt = std::make_unique<CrtReduction>(spec_);
  const PulseModel pulse{config_.epsilon, config_.gamma, 1.0};
  for (std::size_t k = 0; k < impl->crt->components(); ++k)
    impl->preimages.push_back(std::make_shared<const PreimageMap>(build_preimage_map(*impl->crt, k, pulse)));
  if (config_.trace_dlog) impl->dlog = std::make_unique<DlogPipeline>(spec_, config_.mode, config_.grover_m);
  impl->qubits = search_qubits(config_.p);
  auto l = std::make_shared<RegisterLayout>();
  l->add("q", Value{1} << impl->qubits, Role::work);
  impl->search_layout = l;
  const double quarter = 3.141592653589793 / 4;
  impl->trotter_error = operator_distance(dense_matrix(u_ny_trotter(*l, "q", quarter, config_.trotter_m), l),
                                          u_ny_matrix(impl->qubits, quarter));
  impl_ = impl;
}

Int ExperimentContext::choose_hidden() const {
  if (config_.hidden_s) return *config_.hidden_s;
  if (!config_.hidden_random) throw ConfigError("no hidden index: use --hidden-s, --hidden-random or --sweep");
  std::mt19937_64 rng(config_.seed);
  return static_cast<Int>(rng() % static_cast<std::uint64_t>(spec_->order()));
}

ExperimentReport ExperimentContext::run(Int hidden_s) const {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& spec = *spec_;
  const auto& crt = *impl_->crt;
  const auto& layout = impl_->search_layout;
  ExperimentReport rep;
  rep.config = config_;
  rep.config.g = spec.g;
  rep.hidden_s = hidden_s;
  rep.trotter_error = impl_->trotter_error;
  rep.trotter_qubits = impl_->qubits;

  // Only the oracle sees the hidden index.
  const OracleSpec hidden(spec_, hidden_s, config_.theta, OracleFlavor::phase);
  const GateOp base = make_oracle(hidden, *layout, "q");

  try {
    std::vector<Int> residues;
    for (std::size_t k = 0; k < crt.components(); ++k) {
      const auto& c = spec.basis.components[k];
      GateOp aux = make_aux_oracle(base, layout, "q", impl_->preimages[k], spec, config_.theta, *layout, "q");
      auto found = subspace_search(aux, spec, layout, "q", 0.5, &rep.gates);
      rep.components.push_back(
          {k, c.m, c.M, c.n, found.s_k, found.oracle_calls, found.max_probability, found.probabilities});
      if (found.s_k >= c.m) throw PipelineFault("search", "component index outside Z_m");
      residues.push_back(found.s_k);
    }
    const Int s = crt_compose(residues, spec.basis);
    rep.recovered_s = s;

    auto verdict = verify_solution(
        static_cast<Value>(spec.power(s)),
        [&](double theta) { return make_oracle(hidden.with_theta(theta), *layout, "q"); }, layout, "q", &rep.gates);
    rep.verified = verdict.accepted;
    rep.membership_probability = verdict.membership.probability;
    rep.disambiguation = verdict.disambiguation ? to_string(verdict.disambiguation->verdict) : "skipped";

    // Stage checks on the recovered element against closed forms.
    const auto& il = *crt.index_layout();
    const auto& gl = *crt.group_layout();
    auto stage = [&](const std::string& label, const SparseState& st, const SparseState& expect) {
      rep.stages.push_back({label, fidelity(st, expect), std::nullopt, st.support_size()});
    };
    {
      auto st = crt.index_to_residue_product(crt.index_state(s), &rep.gates);
      BasisTuple t(il.size());
      for (std::size_t k = 0; k < crt.components(); ++k)
        t[il.index("r" + std::to_string(k))] = static_cast<Value>(s % crt.subspace(k).order);
      stage("Phi2", st, SparseState::basis(crt.index_layout(), t));
      auto st3 = crt.index_to_scaled_product(crt.index_state(s), &rep.gates);
      BasisTuple t3(il.size());
      for (std::size_t k = 0; k < crt.components(); ++k)
        t3[il.index("q" + std::to_string(k))] = static_cast<Value>(mul_mod(spec.basis.components[k].M, s, spec.order()));
      stage("Phi3", st3, SparseState::basis(crt.index_layout(), t3));
    }
    const Int h = spec.largest_generator();
    auto phi6 = crt.group_state_to_subgroup_product(crt.group_state(spec.power(s)), &rep.gates);
    {
      BasisTuple t(gl.size());
      for (std::size_t k = 0; k < crt.components(); ++k)
        t[gl.index("c" + std::to_string(k))] =
            static_cast<Value>(pow_mod(crt.subspace(k).generator, s % crt.subspace(k).order, spec.p));
      stage("Phi6", phi6, SparseState::basis(crt.group_layout(), t));
    }
    auto phi7 = crt.to_largest_subspace(phi6, &rep.gates);
    {
      BasisTuple t(gl.size());
      for (std::size_t k = 0; k < crt.components(); ++k)
        t[gl.index("c" + std::to_string(k))] = static_cast<Value>(pow_mod(h, s % crt.subspace(k).order, spec.p));
      stage("Phi7", phi7, SparseState::basis(crt.group_layout(), t));
    }
    const auto config = ProgramConfig::make(spec_);
    const Int m_r = spec.largest_order();
    for (std::size_t keep = 0; keep < crt.components(); ++keep) {
      auto stripped = strip_registers(phi7, keep, crt.group_registers(), config,
                                      PulseModel{config_.epsilon, config_.gamma, 1.0}, &rep.gates);
      const Int x = s % crt.subspace(keep).order;
      BasisTuple t(gl.size());
      t[gl.index("c" + std::to_string(keep))] = static_cast<Value>(pow_mod(h, x, spec.p));
      for (const auto& e : stripped.ledger) {
        rep.halting.push_back({keep, e.pair, e.record.step, e.record.direct});
        const Int y = s % crt.subspace(e.pair).order;
        const Int step = mod(-(x + y), m_r);
        const HaltRecord expect{y == 0 ? 1 : (step == 0 ? m_r : step), y == 0};
        t[gl.index("rec" + std::to_string(e.pair))] = expect.code(m_r);
      }
      rep.stages.push_back({"strip[" + std::to_string(keep) + "]",
                            fidelity(stripped.state, SparseState::basis(crt.group_layout(), t)), stripped.fidelity,
                            stripped.state.support_size()});
    }

    if (impl_->dlog) {
      auto tr = impl_->dlog->trace(spec.power(s), &rep.gates);
      for (const auto& st : tr.stages) rep.stages.push_back({"dlog/" + st.label, st.fidelity, st.weight, st.support});
      rep.euler_weight = tr.euler_weight;
    }
  } catch (const PipelineFault& f) {
    rep.error_stage = f.stage();
    rep.error = f.what();
  }

  rep.classical_s = classical_dlog(spec.p, spec.g, spec.power(hidden_s));
  rep.success = !rep.error_stage && rep.recovered_s && *rep.recovered_s == hidden_s && rep.verified &&
                rep.classical_s == *rep.recovered_s;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentContext ctx(config);
  return ctx.run(ctx.choose_hidden());
}

std::vector<ExperimentReport> run_sweep(const ExperimentConfig& config, unsigned threads) {
  ExperimentContext ctx(config);
  const Int n = ctx.spec()->order();
  std::vector<ExperimentReport> out(static_cast<std::size_t>(n));
  std::atomic<Int> next{0};
  auto worker = [&] {
    for (Int s = next++; s < n; s = next++) out[static_cast<std::size_t>(s)] = ctx.run(s);
  };
  threads = std::max(1u, threads);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

nlohmann::json sweep_to_json(const ExperimentConfig& config, const std::vector<ExperimentReport>& runs) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t ok = 0;
  for (const auto& r : runs) {
    auto j = r.to_json();
    j.erase("config");
    arr.push_back(std::move(j));
    ok += r.success ? 1 : 0;
  }
  return {{"config", config.to_json()}, {"runs", arr}, {"successes", ok}, {"total", runs.size()}};
}

std::string render_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace cycsim
