#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tempavg/circuit.hpp"
#include "tempavg/density.hpp"
#include "tempavg/protocols.hpp"

namespace tempavg {

// ---------------------------------------------------------------------------
// Closed-form SNR lower bounds.  snr1 = delta / s with s the noise standard
// deviation of one measurement; x = sigma_00.

enum class SnrMethod {
  Exhaustive,
  RandomizedFlipSwap,
  LabeledFlipSwap,
  TwoTransitive,
  ConditionalNormalizer,
  FullyRandomizedFlipSwap,
};

std::string snr_method_name(SnrMethod m);
SnrMethod snr_method_from_name(const std::string& s);
std::vector<SnrMethod> all_snr_methods();
/// Experiments contributing to one signal: 2^n - 1, 2 or 1.
int experiments_per_signal(SnrMethod m, int n);

struct SnrInputs {
  int n = 2;
  double snr1 = 1.0;
  double x = 1.0;
};

double snr_bound(SnrMethod m, const SnrInputs& in);

/// CSV columns method,n,snr1,x,snr_bound.
void write_snr_curves(std::ostream& os, std::span<const SnrMethod> methods, int n_lo, int n_hi, double snr1,
                      double x);

// ---------------------------------------------------------------------------
// Exact variances and bounds.  sigma is the measured observable (Hermitian,
// unitary), rho the input state.

/// Randomization over D then a two-transitive group fixing |0>.
double variance_exact_two_transitive(const DensityMatrix& rho, const Eigen::MatrixXcd& sigma);
/// Randomization over D then multiplication by g^c, c uniform (the field's
/// cyclic action on the nonzero states).
double variance_exact_cyclic(const DensityMatrix& rho, const Eigen::MatrixXcd& sigma, const GF2nField& field);
/// Brute force Exp_P tr(P rho_check P^dag sigma)^2 over every product of
/// group elements, groups applied in sequence order (small n only).
double variance_enumerated(std::span<const GroupKind> sequence, const DensityMatrix& rho,
                           const Eigen::MatrixXcd& sigma);
/// tr(rho_check_d^2) + tr(rho_check^2)/(N-2).
double variance_bound_two_transitive(const DensityMatrix& rho);
/// tr(rho_check^2)/(N-2).
double variance_bound_unitary(const DensityMatrix& rho);
/// lambda^k N/(N-2) tr(rho_check_d^2) + tr(rho_check^2)/(N-2), for D, T and
/// k rounds of (N1, T).
double variance_bound_conditional(const DensityMatrix& rho, int k);
/// 2 n^2 delta^2 / (N^2 (N-1)) for a uniform per-qubit polarization delta.
double variance_bound_fully_randomized(int n, double delta);

// ---------------------------------------------------------------------------
// Second-moment tensors E[P X P^dag (x) P X P^dag] in the span of
// D, J, E and Z1 + Z2 (indices >= 1 unless stated).

struct FourTensorCoefficients {
  double alpha = 0;  // D
  double beta = 0;   // J
  double gamma = 0;  // E
  double delta = 0;  // Z1 + Z2
};

/// Coefficients after randomizing rho_check over D and T.
FourTensorCoefficients initial_coefficients(const DensityMatrix& rho);
/// k rounds of (N1, T).
FourTensorCoefficients recursion_coefficients(const FourTensorCoefficients& c0, int n, int k);
/// tr(R sigma (x) sigma).
double variance_from_coefficients(const FourTensorCoefficients& c, const Eigen::MatrixXcd& sigma);
/// Exact variance of D, T, then k rounds of (N1, T).
double variance_exact_conditional(const DensityMatrix& rho, const Eigen::MatrixXcd& sigma, int k);

/// Dense N^2 x N^2 realization of the spanning tensors.  Row index i*N + k
/// and column j*N + l hold the coefficient of |i><j| (x) |k><l|.  Sectors
/// split the nonzero states by the value of qubit `control`.
class FourTensorBasis {
 public:
  enum class Tensor { D, E, J, Z1, Z2 };

  FourTensorBasis(int n, int control);

  int n_qubits() const { return n_; }
  Eigen::MatrixXcd tensor(Tensor t) const;
  /// Sector-restricted versions; a and b are control values (0 or 1).
  Eigen::MatrixXcd d_sector(int a) const;
  Eigen::MatrixXcd e_sector(int a, int b) const;
  Eigen::MatrixXcd j_sector(int a, int b) const;

  Eigen::MatrixXcd realize(const FourTensorCoefficients& c) const;
  /// Least-squares projection; `residual` receives the max-abs leftover.
  FourTensorCoefficients extract(const Eigen::MatrixXcd& r, double* residual = nullptr) const;

  /// Average of (U (x) U) r (U (x) U)^dag over the listed circuits.
  static Eigen::MatrixXcd twirl(const Eigen::MatrixXcd& r, std::span<const Circuit> group);
  /// Dense rho (x) rho.
  static Eigen::MatrixXcd square(const Eigen::MatrixXcd& rho);

 private:
  int n_;
  int control_;
  bool in_sector(Eigen::Index i, int a) const;
};

// ---------------------------------------------------------------------------
// Monte Carlo and decision procedures.

struct VarianceEstimate {
  double mean = 0;
  double variance = 0;
  double stderr_mean = 0;
  double stderr_variance = 0;
  int trials = 0;
};

/// Noiseless values of `trials` independently sampled plans (normalized
/// weights); trial t uses trial_rng(seed, t).  Thread count does not change
/// the result.
VarianceEstimate empirical_variance(const PlanSampler& sampler, const DensityMatrix& rho0, const Circuit& computation,
                                    int trials, std::uint64_t seed, int threads = 1);
VarianceEstimate sample_moments(std::span<const double> values);

/// One-sided check used for inequality bounds.
bool within_bound(const VarianceEstimate& e, double bound);

struct SignDecision {
  int sign = 0;
  int k2 = 1;
  int samples_used = 0;
};

/// k2 = max(1, ceil(4/snr^2)).
int block_size(double snr);
/// Sign of the median of k1 means of consecutive blocks of k2 samples.
/// Throws std::invalid_argument if k1 is even or the stream is too short.
SignDecision sign_decision(std::span<const double> stream, double snr, int k1);

/// max(1, ceil(ln(1/c) / (eps^2 snr^2))), proportionality constant 1.
int experiments_needed(double confidence, double snr, double epsilon);

// ---------------------------------------------------------------------------
// Invariant suites driven by the command line.

struct CheckResult {
  std::string name;
  double measured = 0;
  double expected = 0;
  bool pass = false;
};

std::vector<std::string> verify_suite_names();
/// Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed);

/// CSV columns method,n,exact,bound,empirical,stderr,trials,seed.
struct VarianceReportRow {
  std::string method;
  int n = 0;
  double exact = 0;
  double bound = 0;
  double empirical = 0;
  double stderr_value = 0;
  int trials = 0;
  std::uint64_t seed = 0;
};
void write_variance_report(std::ostream& os, std::span<const VarianceReportRow> rows);

}  // namespace tempavg
