#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cycsim/dlog_pipeline.hpp"
#include "cycsim/halting_program.hpp"
#include "cycsim/numtheory.hpp"

namespace cycsim {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  Int p = 13;
  std::optional<Int> g;
  std::optional<Int> hidden_s;
  bool hidden_random = false;
  std::uint64_t seed = 0;
  double theta = 3.141592653589793;
  AmplifyMode mode = AmplifyMode::exact;
  std::optional<int> grover_m;
  int trotter_m = 16;
  double epsilon = 0.0;
  double gamma = 0.0;
  bool trace_dlog = true;
  bool timing = false;

  // Throws ConfigError ("p must be prime", ...).
  void validate() const;
  nlohmann::json to_json() const;
};

struct ComponentReport {
  std::size_t k = 0;
  Int m = 0, M = 0, n = 0;
  Int s_k = -1;
  std::uint64_t oracle_calls = 0;
  double max_probability = 0;
  std::vector<double> probabilities;
};

struct StageEntry {
  std::string label;
  std::optional<double> fidelity;
  std::optional<double> weight;
  std::size_t support = 0;
};

struct HaltingEntry {
  std::size_t keep = 0;
  std::size_t pair = 0;
  Int step = 0;
  bool direct = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  Int hidden_s = -1;
  std::optional<Int> recovered_s;
  std::vector<ComponentReport> components;
  std::vector<StageEntry> stages;
  std::optional<double> euler_weight;
  std::vector<HaltingEntry> halting;
  GateLedger gates;
  double trotter_error = 0;
  int trotter_qubits = 0;
  bool verified = false;
  std::optional<double> membership_probability;
  std::string disambiguation;
  Int classical_s = -1;
  bool success = false;
  std::optional<std::string> error_stage;
  std::string error;
  double wall_time = 0;

  nlohmann::json to_json() const;
  std::string to_csv_row() const;
  static std::string csv_header();
};

// Shared, read-only state for every run on the same group.
class ExperimentContext {
 public:
  explicit ExperimentContext(const ExperimentConfig& config);
  ExperimentReport run(Int hidden_s) const;
  Int choose_hidden() const;
  const ExperimentConfig& config() const { return config_; }
  const std::shared_ptr<const CyclicGroupSpec>& spec() const { return spec_; }

 private:
  struct Impl;
  ExperimentConfig config_;
  std::shared_ptr<const CyclicGroupSpec> spec_;
  std::shared_ptr<const Impl> impl_;
};

ExperimentReport run_experiment(const ExperimentConfig& config);
// One run per hidden index in Z_{p-1}, assembled in index order.
std::vector<ExperimentReport> run_sweep(const ExperimentConfig& config, unsigned threads = 1);
nlohmann::json sweep_to_json(const ExperimentConfig& config, const std::vector<ExperimentReport>& runs);

// Sorted keys, two-space indent, trailing newline.
std::string render_json(const nlohmann::json& j);
// Writes through a temporary file and renames it into place.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace cycsim
