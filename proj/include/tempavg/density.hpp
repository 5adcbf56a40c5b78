#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tempavg/circuit.hpp"
#include "tempavg/rng.hpp"

namespace tempavg {

/// Dense density matrix on n qubits; qubit 0 is the most significant bit of
/// the basis index.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(int n_qubits, Eigen::MatrixXcd m);

  static DensityMatrix maximally_mixed(int n_qubits);
  static DensityMatrix basis_state(int n_qubits, std::uint64_t k);
  static DensityMatrix pure(int n_qubits, const Eigen::VectorXcd& psi);
  static DensityMatrix diagonal(const std::vector<double>& probs);

  int n_qubits() const { return n_; }
  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  bool is_hermitian(double tol = 1e-12) const;
  /// Hermitian, unit trace, and eigenvalues >= -1e-10.
  bool is_valid(double tol = 1e-12) const;

 private:
  int n_ = 0;
  Eigen::MatrixXcd m_;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

enum class ThermalMode { FirstOrder, ExactProduct };

/// Per-qubit polarizations delta_i (roughly beta times the level splitting
/// of spin i in a high-temperature Boltzmann state).
struct ThermalSpec {
  std::vector<double> deltas;
  ThermalMode mode = ThermalMode::FirstOrder;

  /// The first-order expansion is only meaningful when sum |delta_i| << 1.
  bool first_order_regime() const;
};

/// Diagonal state with rho_bb = prod (1 + (-1)^b_i delta_i)/2, or its
/// first-order expansion (1 + sum (-1)^b_i delta_i)/N.
DensityMatrix thermal_state(const ThermalSpec& spec);

/// U rho U^dagger.
DensityMatrix apply_circuit(const DensityMatrix& rho, const Circuit& c);

struct MeasurementModel {
  double noise_std = 0.0;
};

/// Hermitian observable; for sigma = C^dagger Z_0 C, sigma^2 = I.
struct Observable {
  Eigen::MatrixXcd matrix;
  std::string label;

  static Observable sigma_z1(int n_qubits);
  static Observable conjugated(const Circuit& c);
  bool is_hermitian(double tol = 1e-10) const;
  bool squares_to_identity(double tol = 1e-10) const;
};

double expectation(const DensityMatrix& rho, const Observable& o);
double expectation_sigma_z1(const DensityMatrix& rho);
/// tr(rho Z_0) plus Gaussian noise of standard deviation model.noise_std.
double measure_sigma_z1(const DensityMatrix& rho, const MeasurementModel& model, Rng& rng);

struct DeviationParts {
  double p_bar = 0;           // mean population of the non-ground states
  Eigen::MatrixXcd check;     // rho - p_bar I - (rho_00 - p_bar)|0><0|
  Eigen::MatrixXcd check_d;   // diagonal of check
  Eigen::MatrixXcd check_0;   // row 0 and column 0 of check
  Eigen::MatrixXcd check_not0;
};

DeviationParts deviation_parts(const DensityMatrix& rho);

/// (rho_00 - p_bar)|0><0| + p_bar I.
DensityMatrix effective_pure_target(const DensityMatrix& rho);

/// Observable split used by the variance formulas: diagonal on the
/// non-ground states, the ground row/column, and the non-ground block.
struct SigmaParts {
  double s00 = 0;
  Eigen::MatrixXcd d;
  Eigen::MatrixXcd zero;
  Eigen::MatrixXcd not0;
};

SigmaParts sigma_parts(const Eigen::MatrixXcd& sigma);

/// Traces out the last m qubits.
DensityMatrix partial_trace_last(const DensityMatrix& rho, int m);

/// Header "n=<int>" then N^2 lines "row col re im".
void write_text(std::ostream& os, const DensityMatrix& rho);
DensityMatrix read_text(std::istream& is);

}  // namespace tempavg
