#include <CLI11.hpp>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "cycsim/driver.hpp"

namespace {

using cycsim::ConfigError;
using cycsim::ExperimentConfig;

// Keys mirror the long flag names; flags given on the command line win.
void apply_json_config(const std::string& path, ExperimentConfig& cfg, const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "p") {
        if (!given("--p")) cfg.p = v.get<cycsim::Int>();
      } else if (key == "g") {
        if (!given("--g") && !v.is_null()) cfg.g = v.get<cycsim::Int>();
      } else if (key == "hidden_s") {
        if (!given("--hidden-s") && !v.is_null()) cfg.hidden_s = v.get<cycsim::Int>();
      } else if (key == "hidden_random") {
        if (!given("--hidden-random")) cfg.hidden_random = v.get<bool>();
      } else if (key == "seed") {
        if (!given("--seed")) cfg.seed = v.get<std::uint64_t>();
      } else if (key == "theta") {
        if (!given("--theta")) cfg.theta = v.get<double>();
      } else if (key == "mode") {
        if (!given("--mode")) {
          auto m = v.get<std::string>();
          if (m != "exact" && m != "grover") throw ConfigError("mode must be exact or grover");
          cfg.mode = m == "grover" ? cycsim::AmplifyMode::grover : cycsim::AmplifyMode::exact;
        }
      } else if (key == "grover_m") {
        if (!given("--grover-m") && !v.is_null()) cfg.grover_m = v.get<int>();
      } else if (key == "trotter_m") {
        if (!given("--trotter-m")) cfg.trotter_m = v.get<int>();
      } else if (key == "epsilon") {
        if (!given("--epsilon")) cfg.epsilon = v.get<double>();
      } else if (key == "gamma") {
        if (!given("--gamma")) cfg.gamma = v.get<double>();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("bad value type in config: ") + e.what());
  }
}

void setup_logging(bool verbose) {
  auto logger = spdlog::stderr_color_mt("cycsim");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CYCSIM_LOG")) spdlog::set_level(spdlog::level::from_str(env));
  if (verbose) spdlog::set_level(spdlog::level::debug);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hidden-index search over cyclic group state spaces"};
  ExperimentConfig cfg;
  std::string mode = "exact";
  std::string out_path, csv_path, config_path;
  bool sweep = false, verbose = false, no_trace = false;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--p", cfg.p, "prime modulus");
  app.add_option("--g", cfg.g, "primitive root (default: smallest)");
  auto* hs = app.add_option("--hidden-s", cfg.hidden_s, "hidden index in Z_{p-1}");
  auto* hr = app.add_flag("--hidden-random", cfg.hidden_random, "draw the hidden index from --seed");
  auto* sw = app.add_flag("--sweep", sweep, "run every hidden index");
  hs->excludes(hr)->excludes(sw);
  hr->excludes(sw);
  app.add_option("--seed", cfg.seed, "rng seed");
  app.add_option("--theta", cfg.theta, "oracle phase angle");
  app.add_option("--mode", mode, "amplification mode")->check(CLI::IsMember({"exact", "grover"}));
  app.add_option("--grover-m", cfg.grover_m, "Grover iteration count override");
  app.add_option("--trotter-m", cfg.trotter_m, "Trotter step count for the operator check");
  app.add_option("--epsilon", cfg.epsilon, "state-locking pulse leakage");
  app.add_option("--gamma", cfg.gamma, "state-locking leakage phase");
  app.add_option("--out", out_path, "JSON report path");
  app.add_option("--csv", csv_path, "CSV path, one row per hidden index");
  app.add_option("--threads", threads, "sweep worker threads");
  app.add_flag("--no-dlog-trace", no_trace, "skip the discrete-log stage trace");
  app.add_flag("--timing", cfg.timing, "include wall time in the report");
  app.add_flag("--verbose", verbose, "debug logging");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  setup_logging(verbose);

  try {
    cfg.mode = mode == "grover" ? cycsim::AmplifyMode::grover : cycsim::AmplifyMode::exact;
    if (!config_path.empty()) apply_json_config(config_path, cfg, app);
    cfg.trace_dlog = !no_trace;
    cfg.validate();
    if (!sweep && !cfg.hidden_s && !cfg.hidden_random)
      throw ConfigError("choose one of --hidden-s, --hidden-random or --sweep");

    std::vector<cycsim::ExperimentReport> runs;
    nlohmann::json report;
    if (sweep) {
      spdlog::info("sweep p={} on {} threads", cfg.p, threads);
      runs = cycsim::run_sweep(cfg, threads);
      report = cycsim::sweep_to_json(cfg, runs);
    } else {
      runs.push_back(cycsim::run_experiment(cfg));
      report = runs.front().to_json();
    }

    const std::string text = cycsim::render_json(report);
    if (out_path.empty())
      std::cout << text;
    else
      cycsim::write_atomically(out_path, text);
    if (!csv_path.empty()) {
      std::string rows = cycsim::ExperimentReport::csv_header() + "\n";
      for (const auto& r : runs) rows += r.to_csv_row() + "\n";
      cycsim::write_atomically(csv_path, rows);
    }

    bool ok = true;
    for (const auto& r : runs) {
      if (r.error_stage) spdlog::error("hidden_s={} failed in {}: {}", r.hidden_s, *r.error_stage, r.error);
      ok = ok && r.success;
    }
    spdlog::debug("{} run(s), success={}", runs.size(), ok);
    return ok ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
