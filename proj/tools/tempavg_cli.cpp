// Command-line front end: simulate, snr-curves, sample-group, verify,
// example-nmr.  Exit codes: 0 ok, 2 config error, 3 dimension error,
// 4 verification failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "tempavg/analytics.hpp"
#include "tempavg/config.hpp"

using namespace tempavg;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDimension = 3;
constexpr int kExitVerify = 4;

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int resolve_threads(const Common& c) {
  if (c.threads) return std::max(1, *c.threads);
  if (const char* env = std::getenv("TEMPAVG_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ConfigError(std::string("TEMPAVG_THREADS is not an integer: ") + env);
    }
  }
  return 1;
}

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file " + path);
    }
  }
  std::ostream& os() { return file_ ? static_cast<std::ostream&>(*file_) : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_run_rows(std::ostream& os, const RunResult& r) {
  os.precision(17);
  os << "record,repetition,experiment,weight,value,variance,n_runs\n";
  std::size_t idx = 0;
  for (int rep = 0; rep < r.n_runs; ++rep) {
    while (idx < r.per_experiment_values.size() && r.per_experiment_values[idx].repetition == rep) {
      const auto& e = r.per_experiment_values[idx++];
      os << "experiment," << rep << ',' << e.experiment << ',' << e.weight << ',' << e.value << ",,\n";
    }
    os << "repetition," << rep << ",,," << r.repetition_values[static_cast<std::size_t>(rep)] << ",,\n";
  }
  os << "summary,,,," << r.weighted_mean << ',' << r.empirical_variance << ',' << r.n_runs << '\n';
}

int cmd_simulate(const std::string& config_path, const std::string& manifest_path, const Common& common) {
  RunConfig cfg = load_run_config(config_path);
  if (common.seed) cfg.seed = *common.seed;
  const std::vector<double> deltas = expanded_deltas(cfg);
  const Circuit computation = load_computation(cfg);
  PreparationPlan plan;
  try {
    plan = build_plan(cfg);
  } catch (const DimensionError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const DensityMatrix rho0 = thermal_state({deltas, ThermalMode::FirstOrder});
  const RunResult r =
      run_protocol(plan, rho0, computation, {cfg.noise_std}, cfg.repetitions, cfg.seed, resolve_threads(common));
  if (!manifest_path.empty()) {
    std::ofstream m(manifest_path, std::ios::binary);
    if (!m) throw ConfigError("cannot open manifest file " + manifest_path);
    nlohmann::json j = plan_manifest(plan);
    j["config"] = to_json(cfg);
    m << j.dump(2) << '\n';
  }
  Sink sink(common.out);
  sink.os() << "# protocol=" << protocol_name(plan.protocol) << " n=" << cfg.n << " n_total=" << plan.n_total
            << " seed=" << cfg.seed << " output_scale=" << plan.output_scale << '\n';
  write_run_rows(sink.os(), r);
  return 0;
}

int cmd_snr_curves(const std::string& methods_arg, int n_min, int n_max, double snr1, double x, const Common& common) {
  std::vector<SnrMethod> methods;
  if (methods_arg == "all") {
    methods = all_snr_methods();
  } else {
    std::stringstream ss(methods_arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        methods.push_back(snr_method_from_name(item));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (n_min < 2 || n_max < n_min || n_max > 62) throw ConfigError("n range must satisfy 2 <= n-min <= n-max <= 62");
  if (!(snr1 > 0) || std::abs(x) > 1) throw ConfigError("need snr1 > 0 and |x| <= 1");
  Sink sink(common.out);
  write_snr_curves(sink.os(), methods, n_min, n_max, snr1, x);
  return 0;
}

int cmd_sample_group(const std::string& group, int n, int count, const Common& common) {
  GroupKind kind;
  try {
    kind = group_kind_from_name(group);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (count < 1) throw ConfigError("count must be >= 1");
  const std::uint64_t seed = common.seed.value_or(0);
  Sink sink(common.out);
  for (int i = 0; i < count; ++i) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(i));
    GroupElement e;
    try {
      e = sample_element(kind, n, rng);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(err.what());
    }
    nlohmann::json j = element_to_json(e, seed);
    j["index"] = i;
    j["circuit"] = circuit_to_json(element_to_circuit(e));
    sink.os() << j.dump() << '\n';
  }
  return 0;
}

int cmd_verify(const std::string& suite, const Common& common) {
  std::vector<CheckResult> results;
  try {
    results = run_verify_suite(suite, common.seed.value_or(1));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Sink sink(common.out);
  sink.os().precision(17);
  bool ok = true;
  for (const auto& c : results) {
    sink.os() << (c.pass ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured << " expected=" << c.expected
              << '\n';
    ok = ok && c.pass;
  }
  sink.os() << (ok ? "suite " + suite + " passed\n" : "suite " + suite + " FAILED\n");
  return ok ? 0 : kExitVerify;
}

// Two qubits, populations 1/4 + 1e-5 (1, 0.6, -0.6, -1): three experiments
// (identity and the two cyclic shifts of the excited states), then the
// average of the sigma_z^(1) readings.
int cmd_example_nmr(const Common& common) {
  const std::vector<double> deltas{3.2e-5, 0.8e-5};
  const DensityMatrix rho = thermal_state({deltas, ThermalMode::FirstOrder});
  const PreparationPlan plan = exhaustive_plan(2);
  const RunResult r = run_protocol(plan, rho, Circuit(2), {}, 1, common.seed.value_or(0), 1);
  Sink sink(common.out);
  auto& os = sink.os();
  os << "# deltas=" << deltas[0] << ',' << deltas[1] << " first-order thermal input\n";
  os.precision(17);
  os << "experiment,rho00,rho11,rho22,rho33,sigma_z1\n";
  for (std::size_t e = 0; e < plan.experiments.size(); ++e) {
    const DensityMatrix p = apply_circuit(rho, plan.experiments[e].prep);
    os << e;
    for (int i = 0; i < 4; ++i) os << ',' << p(i, i).real();
    os << ',' << r.per_experiment_values[e].value << '\n';
  }
  os << "average," << r.weighted_mean << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-averaging effective pure state preparation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out, "Write output to this file instead of stdout");
  app.add_option("--seed", common.seed, "Master seed (overrides the config)");
  app.add_option("--threads", common.threads, "Worker threads (default: TEMPAVG_THREADS or 1)");

  std::string config_path, manifest_path;
  auto* sim = app.add_subcommand("simulate", "Run a protocol from a JSON config; CSV on stdout");
  sim->add_option("--config", config_path, "Run config (JSON)")->required();
  sim->add_option("--manifest", manifest_path, "Also write the plan manifest (JSON)");

  std::string methods = "all";
  int n_min = 2, n_max = 10;
  double snr1 = 1e3, x = 1;
  auto* snr = app.add_subcommand("snr-curves", "Emit SNR lower bounds as CSV");
  snr->add_option("--methods", methods, "Comma-separated methods or 'all'");
  snr->add_option("--n-min", n_min);
  snr->add_option("--n-max", n_max);
  snr->add_option("--snr1", snr1, "Single-qubit SNR delta/s");
  snr->add_option("--x", x, "sigma_00");

  std::string group = "normalizer";
  int group_n = 2, count = 1;
  auto* sample = app.add_subcommand("sample-group", "Sample group elements; one JSON object per line");
  sample->add_option("--group", group, "diagonal, linear, cyclic, normalizer, conditional_normalizer");
  sample->add_option("--n", group_n);
  sample->add_option("--count", count);

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run an invariant suite");
  verify->add_option("--suite", suite, "groups, variances, protocols or symplectic")->required();

  auto* nmr = app.add_subcommand("example-nmr", "Reproduce the two-qubit worked example");

  // Global flags are accepted after the subcommand too.
  for (auto* sub : {sim, snr, sample, verify, nmr}) {
    sub->add_option("--out", common.out);
    sub->add_option("--seed", common.seed);
    sub->add_option("--threads", common.threads);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(config_path, manifest_path, common);
    if (*snr) return cmd_snr_curves(methods, n_min, n_max, snr1, x, common);
    if (*sample) return cmd_sample_group(group, group_n, count, common);
    if (*verify) return cmd_verify(suite, common);
    if (*nmr) return cmd_example_nmr(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return kExitDimension;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
