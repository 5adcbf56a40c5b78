#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tempavg/protocols.hpp"

namespace tempavg {

/// Malformed or schema-violating configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input of the `simulate` command.  Keys: protocol, n, deltas (number or
/// list), noise_std, repetitions, k_steps, seed, computation (path to a
/// gate-list JSON file, relative paths resolved against `base_dir`).
struct RunConfig {
  Protocol protocol = Protocol::Exhaustive;
  int n = 2;
  std::vector<double> deltas{0.0};
  bool scalar_delta = true;
  double noise_std = 0.0;
  int repetitions = 1;
  std::optional<int> k_steps;
  std::uint64_t seed = 0;
  std::optional<std::string> computation;
  std::string base_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& j, std::string base_dir = "");
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

/// Qubits the protocol acts on: n, n + 1 (labeled) or 2n (entanglement).
int total_qubits(Protocol p, int n);
/// Per-qubit polarizations for the full register.  A scalar is replicated;
/// a list must match total_qubits (DimensionError otherwise).
std::vector<double> expanded_deltas(const RunConfig& c);
/// Deterministic plan, or the first sample of a random plan.
PreparationPlan build_plan(const RunConfig& c);
/// Empty circuit on n qubits when no computation file is given.
Circuit load_computation(const RunConfig& c);

}  // namespace tempavg
