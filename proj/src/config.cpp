#include "tempavg/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

namespace tempavg {

namespace {

template <class T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

int get_int(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("config key '") + key + "' must be an integer");
  return get_field<int>(j, key);
}

bool uses_k(Protocol p) { return p == Protocol::FullyRandomizedFlipSwap || p == Protocol::GroupRandomization; }

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j, std::string base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"protocol",    "n",       "deltas", "noise_std",
                                           "repetitions", "k_steps", "seed",   "computation"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  for (const char* required : {"protocol", "n"})
    if (!j.contains(required)) throw ConfigError(std::string("missing config key '") + required + "'");

  RunConfig c;
  c.base_dir = std::move(base_dir);
  try {
    c.protocol = protocol_from_name(get_field<std::string>(j, "protocol"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.n = get_int(j, "n");
  const int n_max = c.protocol == Protocol::Entanglement ? kMaxFieldDegree / 2
                    : c.protocol == Protocol::LabeledFlipSwap ? kMaxFieldDegree - 1
                                                                : kMaxFieldDegree;
  if (c.n < 2 || c.n > n_max)
    throw ConfigError("n must be in [2, " + std::to_string(n_max) + "] for " + protocol_name(c.protocol));

  if (j.contains("deltas")) {
    const auto& d = j.at("deltas");
    if (d.is_number()) {
      c.deltas = {d.get<double>()};
      c.scalar_delta = true;
    } else if (d.is_array() && !d.empty()) {
      c.deltas.clear();
      for (const auto& v : d) {
        if (!v.is_number()) throw ConfigError("deltas must be numbers");
        c.deltas.push_back(v.get<double>());
      }
      c.scalar_delta = false;
    } else {
      throw ConfigError("deltas must be a number or a non-empty list");
    }
    for (double v : c.deltas)
      if (!(std::abs(v) < 1)) throw ConfigError("each delta must satisfy |delta| < 1");
  }
  if (j.contains("noise_std")) {
    if (!j.at("noise_std").is_number()) throw ConfigError("noise_std must be a number");
    c.noise_std = j.at("noise_std").get<double>();
    if (!(c.noise_std >= 0)) throw ConfigError("noise_std must be >= 0");
  }
  if (j.contains("repetitions")) {
    c.repetitions = get_int(j, "repetitions");
    if (c.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  }
  if (j.contains("k_steps") && !j.at("k_steps").is_null()) {
    c.k_steps = get_int(j, "k_steps");
    if (*c.k_steps < 0) throw ConfigError("k_steps must be >= 0");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("computation") && !j.at("computation").is_null())
    c.computation = get_field<std::string>(j, "computation");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["protocol"] = protocol_name(c.protocol);
  j["n"] = c.n;
  if (c.scalar_delta)
    j["deltas"] = c.deltas.at(0);
  else
    j["deltas"] = c.deltas;
  j["noise_std"] = c.noise_std;
  j["repetitions"] = c.repetitions;
  if (c.k_steps) j["k_steps"] = *c.k_steps;
  j["seed"] = c.seed;
  if (c.computation) j["computation"] = *c.computation;
  return j;
}

int total_qubits(Protocol p, int n) {
  if (p == Protocol::LabeledFlipSwap) return n + 1;
  if (p == Protocol::Entanglement) return 2 * n;
  return n;
}

std::vector<double> expanded_deltas(const RunConfig& c) {
  const int total = total_qubits(c.protocol, c.n);
  if (c.scalar_delta) return std::vector<double>(static_cast<std::size_t>(total), c.deltas.at(0));
  if (static_cast<int>(c.deltas.size()) != total)
    throw DimensionError("deltas has " + std::to_string(c.deltas.size()) + " entries, protocol " +
                         protocol_name(c.protocol) + " needs " + std::to_string(total));
  return c.deltas;
}

PreparationPlan build_plan(const RunConfig& c) {
  const int k = c.k_steps.value_or(uses_k(c.protocol) ? choose_k(c.n) : 0);
  Rng rng = trial_rng(c.seed, 0);
  PreparationPlan plan;
  switch (c.protocol) {
    case Protocol::Exhaustive:
      plan = exhaustive_plan(c.n);
      break;
    case Protocol::FlipSwap:
      plan = flip_swap_plan(c.n);
      break;
    case Protocol::RandomizedFlipSwap:
      plan = randomized_flip_swap_plan(c.n, rng);
      break;
    case Protocol::LabeledFlipSwap:
      plan = labeled_flip_swap_plan(c.n);
      break;
    case Protocol::FullyRandomizedFlipSwap:
      plan = fully_randomized_flip_swap_plan(c.n, k, rng);
      break;
    case Protocol::GroupRandomization:
      plan = group_randomization_plan(c.n, k, rng);
      break;
    case Protocol::Entanglement:
      plan = entanglement_plan(c.n);
      break;
  }
  plan.seed = c.seed;
  return plan;
}

Circuit load_computation(const RunConfig& c) {
  if (!c.computation) return Circuit(c.n);
  std::filesystem::path p(*c.computation);
  if (p.is_relative() && !c.base_dir.empty()) p = std::filesystem::path(c.base_dir) / p;
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open computation file " + p.string());
  Circuit circ;
  try {
    nlohmann::json j;
    in >> j;
    circ = circuit_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError("computation file " + p.string() + ": " + e.what());
  }
  const int total = total_qubits(c.protocol, c.n);
  if (circ.n_qubits() != c.n && circ.n_qubits() != total)
    throw DimensionError("computation acts on " + std::to_string(circ.n_qubits()) + " qubits, expected " +
                         std::to_string(c.n));
  return circ;
}

}  // namespace tempavg
