#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcdma/capacity.hpp"
#include "qcdma/duffing.hpp"
#include "qcdma/fock.hpp"

namespace qcdma::scenario {

inline constexpr const char* kConfigSchema = "qcdma-config/1";

struct IntegrationBlock {
  double dt_periods = 1e-3;       // step as a fraction of 2*pi/omega0
  double transient_periods = 300;  // drive periods discarded before analysis
  double horizon_periods = 2500;   // drive periods kept for analysis
  chaos::OscState init_a{0.1, 0.0};
  chaos::OscState init_b{0.11, 0.0};
  int output_stride = 25;          // row thinning for trajectory CSVs
};

struct SpectralBlock {
  int segments = 8;
  double band_threshold = 1e-6;
  bool rect_window = false;  // rectangular taper (matched-window M estimates)
};

struct SweepSpec {
  std::string parameter = "f_d";
  double start = 1.0;
  double stop = 40.0;
  int steps = 27;
};

struct ScenarioConfig {
  std::string scenario;  // chaos | sync | spectrum | fidelity-sweep | p0-sweep | capacity
  chaos::DuffingParams duffing;
  IntegrationBlock integration;
  SpectralBlock spectral;
  fock::SimConfig sim;
  capacity::ChannelModel channel;
  capacity::SweepConfig capacity_sweep;
  SweepSpec sweep;
  double p0 = 0.6;  // qubit weight, q1 = p0 and q2 = 1 - p0
  std::filesystem::path out_dir = "out";
  bool plots = false;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string raw_text;  // original config text, hashed into the manifest
};

struct ValidationResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty() && config.has_value(); }
};

/// Parses and validates a JSON config; all schema violations are collected
/// rather than reported one at a time. A parse failure yields a single error
/// carrying the parser's position information.
ValidationResult validate_config(const std::string& raw_text);

/// Reads defaults for a scenario (everything optional except scenario + seed).
std::string default_config_text(const std::string& scenario_name);

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunManifest {
  std::string tool_version;
  std::string config_sha256;
  std::uint64_t seed = 0;
  std::string scenario;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;
  std::vector<ManifestEntry> outputs;
};

/// Exit codes mirrored by the CLI.
enum class RunStatus : int {
  Ok = 0,
  InvalidConfig = 2,
  Divergence = 3,
  Unconverged = 4,
};

struct RunResult {
  RunStatus status = RunStatus::Ok;
  std::string message;
  RunManifest manifest;
};

/// Executes the configured scenario, writes CSV outputs (and optional SVG
/// plots) plus run_manifest.json into config.out_dir. Output bytes of every
/// CSV are a pure function of (config, seed), independent of thread count.
RunResult run_scenario(const ScenarioConfig& config);

}  // namespace qcdma::scenario
