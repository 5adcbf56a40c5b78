#include "tempavg/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>

#include "tempavg/stats.hpp"

namespace tempavg {

namespace {

void check_n(int n, int lo, int hi, const char* what) {
  if (n < lo || n > hi) throw std::invalid_argument(std::string(what) + ": n out of range");
}

PreparationPlan make_plan(Protocol p, int n_compute, int n_total) {
  PreparationPlan plan;
  plan.protocol = p;
  plan.n_compute = n_compute;
  plan.n_total = n_total;
  return plan;
}

void add_equal_weights(PreparationPlan& plan, std::vector<Circuit> preps, const Circuit& readout) {
  const double w = 1.0 / static_cast<double>(preps.size());
  for (auto& c : preps) plan.experiments.push_back({std::move(c), readout, 1, w});
}

// Qubits 0..n-1 flipped when qubit n (the label) is 1.
Circuit conditional_flip(int n) {
  Circuit c(n + 1);
  for (int q = 0; q < n; ++q) c.add(Gate::cnot(n, q));
  return c;
}

// T, then k rounds of (N1, T); elements are appended to `log`.
Circuit randomizing_sequence(int n, int k, Rng& rng, std::vector<nlohmann::json>& log) {
  Circuit c(n);
  auto push = [&](const GroupElement& e) {
    log.push_back(element_to_json(e));
    c.append(element_to_circuit(e));
  };
  push(sample_linear(n, rng));
  for (int i = 0; i < k; ++i) {
    push(sample_conditional_normalizer(n, rng));
    push(sample_linear(n, rng));
  }
  return c;
}

Circuit widen_computation(const PreparationPlan& plan, const Circuit& computation) {
  if (computation.n_qubits() == plan.n_total) return computation;
  if (computation.n_qubits() == plan.n_compute) return computation.widened(plan.n_total);
  if (computation.n_qubits() == 0 && computation.empty()) return Circuit(plan.n_total);
  throw DimensionError("computation register does not match the plan");
}

void check_plan(const PreparationPlan& plan, const DensityMatrix& rho0) {
  if (rho0.n_qubits() != plan.n_total)
    throw DimensionError("input state has " + std::to_string(rho0.n_qubits()) + " qubits, plan needs " +
                         std::to_string(plan.n_total));
  if (plan.experiments.empty()) throw std::invalid_argument("plan has no experiments");
  for (const auto& e : plan.experiments) {
    if (e.prep.n_qubits() != plan.n_total || e.readout.n_qubits() != plan.n_total)
      throw DimensionError("experiment circuit does not match the plan register");
    if (!(e.weight > 0)) throw std::invalid_argument("experiment weights must be positive");
  }
}

double weight_sum(const PreparationPlan& plan) {
  double s = 0;
  for (const auto& e : plan.experiments) s += e.weight;
  return s;
}

// Noiseless signed expectation of each experiment.
std::vector<double> experiment_expectations(const PreparationPlan& plan, const DensityMatrix& rho0,
                                            const Circuit& wide_computation) {
  std::vector<double> out;
  out.reserve(plan.experiments.size());
  for (const auto& e : plan.experiments) {
    DensityMatrix r = apply_circuit(rho0, e.prep);
    r = apply_circuit(r, wide_computation);
    r = apply_circuit(r, e.readout);
    out.push_back(e.sign * expectation_sigma_z1(r));
  }
  return out;
}

}  // namespace

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Exhaustive:
      return "exhaustive";
    case Protocol::FlipSwap:
      return "flip_swap";
    case Protocol::RandomizedFlipSwap:
      return "randomized_flip_swap";
    case Protocol::LabeledFlipSwap:
      return "labeled_flip_swap";
    case Protocol::FullyRandomizedFlipSwap:
      return "fully_randomized_flip_swap";
    case Protocol::GroupRandomization:
      return "group_randomization";
    case Protocol::Entanglement:
      return "entanglement";
  }
  return "unknown";
}

Protocol protocol_from_name(const std::string& s) {
  for (Protocol p : {Protocol::Exhaustive, Protocol::FlipSwap, Protocol::RandomizedFlipSwap, Protocol::LabeledFlipSwap,
                     Protocol::FullyRandomizedFlipSwap, Protocol::GroupRandomization, Protocol::Entanglement})
    if (protocol_name(p) == s) return p;
  throw std::invalid_argument("unknown protocol: " + s);
}

PreparationPlan exhaustive_plan(int n) {
  check_n(n, 2, kMaxFieldDegree, "exhaustive_plan");
  PreparationPlan plan = make_plan(Protocol::Exhaustive, n, n);
  const std::uint32_t modulus = primitive_polynomial(n);
  const std::uint64_t period = (std::uint64_t{1} << n) - 1;
  std::vector<Circuit> preps;
  for (std::uint64_t k = 0; k < period; ++k) {
    const CyclicElement e{n, k, modulus};
    plan.elements.push_back(element_to_json(e));
    preps.push_back(element_to_circuit(e));
  }
  add_equal_weights(plan, std::move(preps), Circuit(n));
  return plan;
}

Circuit flip_swap_circuit(int n) {
  check_n(n, 2, kMaxFieldDegree + 1, "flip_swap_circuit");
  Circuit c(n);
  for (int q = 0; q < n; ++q) c.add(Gate::x(q));
  for (int j = 1; j < n; ++j) c.add(Gate::cnot(0, j));
  std::vector<int> controls;
  for (int j = 1; j < n; ++j) controls.push_back(j);
  c.add(Gate::toffoli(controls, std::vector<int>(controls.size(), 0), 0));
  for (int j = n - 1; j >= 1; --j) c.add(Gate::cnot(0, j));
  return c;
}

PreparationPlan flip_swap_plan(int n) {
  PreparationPlan plan = make_plan(Protocol::FlipSwap, n, n);
  add_equal_weights(plan, {Circuit(n), flip_swap_circuit(n)}, Circuit(n));
  return plan;
}

Circuit ones_to(const BitVector& b) {
  const int n = b.size();
  if (n < 1 || b.is_zero()) throw std::invalid_argument("ones_to: b must be a nonzero vector");
  int pivot = 0;
  while (!b.get(pivot)) ++pivot;
  Circuit c(n);
  for (int j = 0; j < n; ++j)
    if (!b.get(j)) c.add(Gate::cnot(pivot, j));
  return c;
}

PreparationPlan randomized_flip_swap_plan_for(int n, const BitVector& b) {
  check_n(n, 2, kMaxFieldDegree, "randomized_flip_swap_plan");
  if (b.size() != n) throw std::invalid_argument("randomized_flip_swap_plan: b has the wrong length");
  PreparationPlan plan = make_plan(Protocol::RandomizedFlipSwap, n, n);
  const Circuit r = ones_to(b);
  Circuit fs = flip_swap_circuit(n);
  fs.append(r);
  add_equal_weights(plan, {r, fs}, Circuit(n));
  plan.elements.push_back({{"b", b.to_string()}});
  return plan;
}

PreparationPlan randomized_flip_swap_plan(int n, Rng& rng) {
  check_n(n, 2, kMaxFieldDegree, "randomized_flip_swap_plan");
  const std::uint64_t idx = 1 + uniform_below(rng, (std::uint64_t{1} << n) - 1);
  PreparationPlan plan = randomized_flip_swap_plan_for(n, basis_bits(idx, n));
  plan.sampler = PlanSampler{Protocol::RandomizedFlipSwap, n, 0};
  return plan;
}

PreparationPlan labeled_flip_swap_plan(int n) {
  check_n(n, 2, kMaxFieldDegree - 1, "labeled_flip_swap_plan");
  PreparationPlan plan = make_plan(Protocol::LabeledFlipSwap, n, n + 1);
  Circuit readout(n + 1);
  readout.add(Gate::cnot(n, 0));  // measured Z_0 becomes Z_0 Z_label
  Circuit second = flip_swap_circuit(n + 1);
  second.append(conditional_flip(n));
  add_equal_weights(plan, {conditional_flip(n), second}, readout);
  return plan;
}

PreparationPlan fully_randomized_flip_swap_plan(int n, int k, Rng& rng) {
  check_n(n, 2, kMaxFieldDegree, "fully_randomized_flip_swap_plan");
  if (k < 0) throw std::invalid_argument("fully_randomized_flip_swap_plan: k must be >= 0");
  PreparationPlan plan = make_plan(Protocol::FullyRandomizedFlipSwap, n, n);
  const Circuit q = randomizing_sequence(n, k, rng, plan.elements);
  Circuit fs = flip_swap_circuit(n);
  fs.append(q);
  add_equal_weights(plan, {q, fs}, Circuit(n));
  plan.output_scale = 2.0;
  plan.k_steps = k;
  plan.sampler = PlanSampler{Protocol::FullyRandomizedFlipSwap, n, k};
  return plan;
}

PreparationPlan group_randomization_plan(int n, int k, Rng& rng) {
  check_n(n, 2, kMaxFieldDegree, "group_randomization_plan");
  if (k < 0) throw std::invalid_argument("group_randomization_plan: k must be >= 0");
  PreparationPlan plan = make_plan(Protocol::GroupRandomization, n, n);
  const DiagonalElement d = sample_diagonal(n, rng);
  plan.elements.push_back(element_to_json(d));
  Circuit c = element_to_circuit(d);
  c.append(randomizing_sequence(n, k, rng, plan.elements));
  add_equal_weights(plan, {c}, Circuit(n));
  plan.k_steps = k;
  plan.sampler = PlanSampler{Protocol::GroupRandomization, n, k};
  return plan;
}

int choose_k(int n) {
  check_n(n, 2, 62, "choose_k");
  const double big_n = std::ldexp(1.0, n);
  const double lambda = std::exp(1.0 / (big_n + 2)) / 2;
  const double threshold = 1.0 / (2 * (big_n + 2));
  int k = 0;
  for (double p = 1.0; p > threshold; p *= lambda) ++k;
  return k;
}

Circuit entanglement_prepare(int n) {
  check_n(n, 2, kMaxFieldDegree / 2, "entanglement_prepare");
  const GF2nField field(n);
  Circuit c(2 * n);
  for (int q = n; q < 2 * n; ++q) c.add(Gate::ry90(q));
  for (int i = 0; i < n; ++i) {
    const GF2nElement m = field.pow(field.generator(), std::uint64_t{1} << i);
    const Circuit mul = element_to_circuit(LinearPermElement{to_qubit_order(multiplication_matrix(m))});
    // Exponent bit i (weight 2^i) lives on qubit n + (n-1-i).
    c.add(Gate::conditioned(n + (n - 1 - i), 1, mul.widened(2 * n)));
  }
  return c;
}

PreparationPlan entanglement_plan(int n) {
  PreparationPlan plan = make_plan(Protocol::Entanglement, n, 2 * n);
  add_equal_weights(plan, {entanglement_prepare(n)}, Circuit(2 * n));
  return plan;
}

PlanSampler sampler_for(Protocol p, int n, int k) {
  if (p != Protocol::RandomizedFlipSwap && p != Protocol::FullyRandomizedFlipSwap &&
      p != Protocol::GroupRandomization)
    throw std::invalid_argument("protocol " + protocol_name(p) + " is deterministic");
  return {p, n, k};
}

PreparationPlan sample_plan(const PlanSampler& s, Rng& rng) {
  switch (s.protocol) {
    case Protocol::RandomizedFlipSwap:
      return randomized_flip_swap_plan(s.n, rng);
    case Protocol::FullyRandomizedFlipSwap:
      return fully_randomized_flip_swap_plan(s.n, s.k, rng);
    case Protocol::GroupRandomization:
      return group_randomization_plan(s.n, s.k, rng);
    default:
      throw std::invalid_argument("protocol " + protocol_name(s.protocol) + " has no sampler");
  }
}

DensityMatrix average_prepared_state(const PreparationPlan& plan, const DensityMatrix& rho0) {
  check_plan(plan, rho0);
  const double total = weight_sum(plan);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho0.dim(), rho0.dim());
  for (const auto& e : plan.experiments) acc += (e.weight / total) * apply_circuit(rho0, e.prep).matrix();
  return {rho0.n_qubits(), std::move(acc)};
}

double noiseless_value(const PreparationPlan& plan, const DensityMatrix& rho0, const Circuit& computation) {
  check_plan(plan, rho0);
  const auto vals = experiment_expectations(plan, rho0, widen_computation(plan, computation));
  const double total = weight_sum(plan);
  double v = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) v += plan.experiments[i].weight / total * vals[i];
  return v;
}

RunResult run_protocol(const PreparationPlan& plan, const DensityMatrix& rho0, const Circuit& computation,
                       const MeasurementModel& model, int repetitions, std::uint64_t seed, int threads) {
  if (repetitions < 1) throw std::invalid_argument("run_protocol: repetitions must be >= 1");
  if (model.noise_std < 0) throw std::invalid_argument("run_protocol: noise_std must be >= 0");
  check_plan(plan, rho0);
  const Circuit wide = widen_computation(plan, computation);

  // Deterministic plans: one exact evaluation shared by all repetitions.
  std::vector<double> fixed;
  if (!plan.sampler) fixed = experiment_expectations(plan, rho0, wide);

  std::vector<std::vector<double>> measured(static_cast<std::size_t>(repetitions));
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(repetitions));

  auto run_one = [&](int r) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(r));
    std::vector<double> exact;
    std::vector<double> w;
    if (plan.sampler) {
      const PreparationPlan p = sample_plan(*plan.sampler, rng);
      exact = experiment_expectations(p, rho0, wide);
      const double total = weight_sum(p);
      for (const auto& e : p.experiments) w.push_back(e.weight / total);
    } else {
      exact = fixed;
      const double total = weight_sum(plan);
      for (const auto& e : plan.experiments) w.push_back(e.weight / total);
    }
    std::normal_distribution<double> noise(0.0, model.noise_std);
    for (auto& v : exact)
      if (model.noise_std > 0) v += noise(rng);
    measured[static_cast<std::size_t>(r)] = std::move(exact);
    weights[static_cast<std::size_t>(r)] = std::move(w);
  };

  const int n_threads = std::clamp(threads, 1, repetitions);
  if (n_threads == 1) {
    for (int r = 0; r < repetitions; ++r) run_one(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int r = t; r < repetitions; r += n_threads) run_one(r);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  RunResult res;
  res.protocol = plan.protocol;
  res.n = plan.n_compute;
  res.seed = seed;
  res.n_runs = repetitions;
  RunningMoments m;
  for (int r = 0; r < repetitions; ++r) {
    const auto& vals = measured[static_cast<std::size_t>(r)];
    const auto& w = weights[static_cast<std::size_t>(r)];
    double v = 0;
    for (std::size_t e = 0; e < vals.size(); ++e) {
      res.per_experiment_values.push_back({r, static_cast<int>(e), w[e], vals[e]});
      v += w[e] * vals[e];
    }
    v *= plan.output_scale;
    res.repetition_values.push_back(v);
    m.add(v);
  }
  res.weighted_mean = m.mean;
  res.empirical_variance = m.variance();
  return res;
}

nlohmann::json plan_manifest(const PreparationPlan& plan) {
  nlohmann::json j;
  j["protocol"] = protocol_name(plan.protocol);
  j["n_compute"] = plan.n_compute;
  j["n_total"] = plan.n_total;
  j["output_scale"] = plan.output_scale;
  if (plan.k_steps) j["k_steps"] = *plan.k_steps;
  if (plan.seed) j["seed"] = *plan.seed;
  if (plan.sampler)
    j["sampler"] = {{"protocol", protocol_name(plan.sampler->protocol)}, {"n", plan.sampler->n}, {"k", plan.sampler->k}};
  j["experiments"] = nlohmann::json::array();
  for (const auto& e : plan.experiments)
    j["experiments"].push_back({{"prep", circuit_to_json(e.prep)},
                                {"readout", circuit_to_json(e.readout)},
                                {"sign", e.sign},
                                {"weight", e.weight}});
  j["elements"] = plan.elements;
  return j;
}

void write_run_csv_header(std::ostream& os) { os << "protocol,n,seed,mean,variance,n_runs\n"; }

void write_run_csv_row(std::ostream& os, const RunResult& r) {
  const auto old = os.precision(17);
  os << protocol_name(r.protocol) << ',' << r.n << ',' << r.seed << ',' << r.weighted_mean << ','
     << r.empirical_variance << ',' << r.n_runs << '\n';
  os.precision(old);
}

}  // namespace tempavg
