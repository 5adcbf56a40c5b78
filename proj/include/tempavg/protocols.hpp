#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tempavg/circuit.hpp"
#include "tempavg/density.hpp"
#include "tempavg/groups.hpp"

namespace tempavg {

/// Register sizes of a plan, state and computation disagree.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Protocol {
  Exhaustive,
  FlipSwap,
  RandomizedFlipSwap,
  LabeledFlipSwap,
  FullyRandomizedFlipSwap,
  GroupRandomization,
  Entanglement,
};

std::string protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& s);

/// One preparation: prep, then the computation, then readout, then a
/// measurement of Z on qubit 0 multiplied by `sign`.
struct Experiment {
  Circuit prep;
  Circuit readout;
  int sign = 1;
  double weight = 1.0;
};

/// Description of a random plan; each repetition draws a fresh plan.
struct PlanSampler {
  Protocol protocol = Protocol::GroupRandomization;
  int n = 2;
  int k = 0;
};

struct PreparationPlan {
  Protocol protocol = Protocol::Exhaustive;
  int n_compute = 0;
  int n_total = 0;
  std::vector<Experiment> experiments;
  /// Reported value = output_scale * sum_e weight_e * sign_e * measurement_e.
  double output_scale = 1.0;
  std::optional<int> k_steps;
  std::optional<std::uint64_t> seed;
  std::optional<PlanSampler> sampler;
  std::vector<nlohmann::json> elements;  // sampled group elements, in order
};

/// Multiplication by g^k for k = 0..2^n-2, equal weights.
PreparationPlan exhaustive_plan(int n);

/// NOT on every qubit, then |0...0> <-> |1...1>; fixes those two states
/// and flips every other basis state.
Circuit flip_swap_circuit(int n);
/// Experiments {I, flip&swap}, equal weights.
PreparationPlan flip_swap_plan(int n);

/// Linear map with L 1...1 = b using n - weight(b) CNOTs; b != 0.
Circuit ones_to(const BitVector& b);
PreparationPlan randomized_flip_swap_plan(int n, Rng& rng);
PreparationPlan randomized_flip_swap_plan_for(int n, const BitVector& b);

/// n + 1 qubits; the last one is the label.
PreparationPlan labeled_flip_swap_plan(int n);

/// T followed by k rounds of (N1, T), sampled once and shared by both branches.
PreparationPlan fully_randomized_flip_swap_plan(int n, int k, Rng& rng);
/// D, T, then k rounds of (N1, T).
PreparationPlan group_randomization_plan(int n, int k, Rng& rng);

/// Smallest k with lambda^k <= 1/(2(N+2)), lambda = e^(1/(N+2))/2.
int choose_k(int n);

/// 2n-qubit circuit: y rotations on the second register, then controlled
/// multiplications of the first register by x^(2^i).
Circuit entanglement_prepare(int n);
PreparationPlan entanglement_plan(int n);

PreparationPlan sample_plan(const PlanSampler& s, Rng& rng);
PlanSampler sampler_for(Protocol p, int n, int k);

/// Exact weighted average of the prepared states (normalized weights).
DensityMatrix average_prepared_state(const PreparationPlan& plan, const DensityMatrix& rho0);

/// Noiseless value of one plan with normalized weights (output_scale ignored):
/// sum_e w_e sign_e tr(Z_0 R C P rho P^dag C^dag R^dag).
double noiseless_value(const PreparationPlan& plan, const DensityMatrix& rho0, const Circuit& computation);

struct ExperimentRecord {
  int repetition = 0;
  int experiment = 0;
  double weight = 0;
  double value = 0;  // signed measurement
};

struct RunResult {
  Protocol protocol = Protocol::Exhaustive;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<ExperimentRecord> per_experiment_values;
  std::vector<double> repetition_values;
  double weighted_mean = 0;
  double empirical_variance = 0;
  int n_runs = 0;
};

/// Computation acts on the first n_compute qubits.  Repetition r uses the
/// stream trial_rng(seed, r) for plan sampling and noise.  Results do not
/// depend on `threads`.
RunResult run_protocol(const PreparationPlan& plan, const DensityMatrix& rho0, const Circuit& computation,
                       const MeasurementModel& model, int repetitions, std::uint64_t seed, int threads = 1);

nlohmann::json plan_manifest(const PreparationPlan& plan);
void write_run_csv_header(std::ostream& os);
void write_run_csv_row(std::ostream& os, const RunResult& r);

}  // namespace tempavg
