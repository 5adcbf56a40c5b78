#include "tempavg/density.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tempavg/gf2.hpp"

namespace tempavg {

namespace {

void check_qubits(int n) {
  if (n < 1 || n > kMaxFieldDegree) throw std::invalid_argument("density matrix: qubit count out of range");
}

void apply_to_columns(Eigen::MatrixXcd& m, const Circuit& c) {
  const auto rows = static_cast<std::size_t>(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) apply_circuit(std::span<cplx>(m.col(j).data(), rows), c);
}

}  // namespace

DensityMatrix::DensityMatrix(int n_qubits, Eigen::MatrixXcd m) : n_(n_qubits), m_(std::move(m)) {
  check_qubits(n_qubits);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (m_.rows() != dim || m_.cols() != dim) throw std::invalid_argument("density matrix: shape does not match qubit count");
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  check_qubits(n_qubits);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return {n_qubits, Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim)};
}

DensityMatrix DensityMatrix::basis_state(int n_qubits, std::uint64_t k) {
  check_qubits(n_qubits);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (k >= static_cast<std::uint64_t>(dim)) throw std::invalid_argument("basis_state: index out of range");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  return {n_qubits, m};
}

DensityMatrix DensityMatrix::pure(int n_qubits, const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (norm == 0) throw std::invalid_argument("pure: zero vector");
  const Eigen::VectorXcd v = psi / norm;
  return {n_qubits, v * v.adjoint()};
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& probs) {
  int n = 0;
  while ((std::size_t{1} << n) < probs.size()) ++n;
  if ((std::size_t{1} << n) != probs.size() || n == 0) throw std::invalid_argument("diagonal: length is not a power of two");
  Eigen::VectorXcd d(static_cast<Eigen::Index>(probs.size()));
  for (std::size_t i = 0; i < probs.size(); ++i) d(static_cast<Eigen::Index>(i)) = probs[i];
  return {n, d.asDiagonal()};
}

bool DensityMatrix::is_hermitian(double tol) const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol; }

bool DensityMatrix::is_valid(double tol) const {
  if (!is_hermitian(tol) || std::abs(m_.trace() - cplx(1, 0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-10;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  const Eigen::Index da = a.dim(), db = b.dim();
  Eigen::MatrixXcd m(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
  return {a.n_qubits() + b.n_qubits(), m};
}

bool ThermalSpec::first_order_regime() const {
  double s = 0;
  for (double d : deltas) s += std::abs(d);
  return s < 0.1;
}

DensityMatrix thermal_state(const ThermalSpec& spec) {
  const int n = static_cast<int>(spec.deltas.size());
  check_qubits(n);
  for (double d : spec.deltas)
    if (!(std::abs(d) < 1.0)) throw std::invalid_argument("thermal_state: |delta| must be < 1");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> p(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    if (spec.mode == ThermalMode::ExactProduct) {
      double v = 1;
      for (int q = 0; q < n; ++q) v *= 0.5 * (1 + (((b >> (n - 1 - q)) & 1U) ? -1 : 1) * spec.deltas[q]);
      p[b] = v;
    } else {
      double v = 1;
      for (int q = 0; q < n; ++q) v += (((b >> (n - 1 - q)) & 1U) ? -1 : 1) * spec.deltas[q];
      p[b] = v / static_cast<double>(dim);
    }
  }
  return DensityMatrix::diagonal(p);
}

DensityMatrix apply_circuit(const DensityMatrix& rho, const Circuit& c) {
  if (c.n_qubits() != rho.n_qubits()) throw std::invalid_argument("apply_circuit: register size mismatch");
  Eigen::MatrixXcd a = rho.matrix();
  apply_to_columns(a, c);  // U rho
  Eigen::MatrixXcd b = a.adjoint();
  apply_to_columns(b, c);  // U (U rho)^dagger = U rho U^dagger
  return {rho.n_qubits(), std::move(b)};
}

Observable Observable::sigma_z1(int n_qubits) {
  check_qubits(n_qubits);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::VectorXcd d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = i < dim / 2 ? 1.0 : -1.0;
  return {d.asDiagonal(), "Z0"};
}

Observable Observable::conjugated(const Circuit& c) {
  const Eigen::MatrixXcd u = unitary(c);
  const Observable z = sigma_z1(c.n_qubits());
  return {u.adjoint() * z.matrix * u, "C^dag Z0 C"};
}

bool Observable::is_hermitian(double tol) const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol; }

bool Observable::squares_to_identity(double tol) const {
  const auto dim = matrix.rows();
  return (matrix * matrix - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() <= tol;
}

double expectation(const DensityMatrix& rho, const Observable& o) {
  if (o.matrix.rows() != rho.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  return (rho.matrix().cwiseProduct(o.matrix.transpose())).sum().real();
}

double expectation_sigma_z1(const DensityMatrix& rho) {
  const Eigen::Index half = rho.dim() / 2;
  double v = 0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) v += (i < half ? 1.0 : -1.0) * rho(i, i).real();
  return v;
}

double measure_sigma_z1(const DensityMatrix& rho, const MeasurementModel& model, Rng& rng) {
  if (model.noise_std < 0) throw std::invalid_argument("measurement: noise_std must be >= 0");
  const double exact = expectation_sigma_z1(rho);
  if (model.noise_std == 0) return exact;
  std::normal_distribution<double> noise(0.0, model.noise_std);
  return exact + noise(rng);
}

DeviationParts deviation_parts(const DensityMatrix& rho) {
  const Eigen::Index dim = rho.dim();
  DeviationParts out;
  double tail = 0;
  for (Eigen::Index i = 1; i < dim; ++i) tail += rho(i, i).real();
  out.p_bar = tail / static_cast<double>(dim - 1);
  out.check = rho.matrix() - out.p_bar * Eigen::MatrixXcd::Identity(dim, dim);
  out.check(0, 0) = 0;
  out.check_d = Eigen::MatrixXcd::Zero(dim, dim);
  out.check_d.diagonal() = out.check.diagonal();
  out.check_0 = Eigen::MatrixXcd::Zero(dim, dim);
  out.check_0.row(0) = out.check.row(0);
  out.check_0.col(0) = out.check.col(0);
  out.check_not0 = out.check - out.check_0;
  return out;
}

DensityMatrix effective_pure_target(const DensityMatrix& rho) {
  const DeviationParts p = deviation_parts(rho);
  const Eigen::Index dim = rho.dim();
  Eigen::MatrixXcd m = p.p_bar * Eigen::MatrixXcd::Identity(dim, dim);
  m(0, 0) = rho(0, 0).real();
  return {rho.n_qubits(), m};
}

SigmaParts sigma_parts(const Eigen::MatrixXcd& sigma) {
  const Eigen::Index dim = sigma.rows();
  SigmaParts out;
  out.s00 = sigma(0, 0).real();
  out.d = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 1; i < dim; ++i) out.d(i, i) = sigma(i, i);
  out.zero = Eigen::MatrixXcd::Zero(dim, dim);
  out.zero.row(0) = sigma.row(0);
  out.zero.col(0) = sigma.col(0);
  out.zero(0, 0) = 0;
  out.not0 = sigma - out.zero;
  out.not0(0, 0) = 0;
  return out;
}

DensityMatrix partial_trace_last(const DensityMatrix& rho, int m) {
  const int n = rho.n_qubits();
  if (m <= 0 || m >= n) throw std::invalid_argument("partial_trace_last: m out of range");
  const Eigen::Index keep = Eigen::Index{1} << (n - m);
  const Eigen::Index drop = Eigen::Index{1} << m;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(keep, keep);
  for (Eigen::Index i = 0; i < keep; ++i)
    for (Eigen::Index j = 0; j < keep; ++j)
      for (Eigen::Index k = 0; k < drop; ++k) out(i, j) += rho(i * drop + k, j * drop + k);
  return {n - m, out};
}

void write_text(std::ostream& os, const DensityMatrix& rho) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << "n=" << rho.n_qubits() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < rho.dim(); ++i)
    for (Eigen::Index j = 0; j < rho.dim(); ++j) buf << i << ' ' << j << ' ' << rho(i, j).real() << ' ' << rho(i, j).imag() << '\n';
  os << buf.str();
}

DensityMatrix read_text(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("n=", 0) != 0) throw std::invalid_argument("density text: missing n= header");
  const int n = std::stoi(header.substr(2));
  check_qubits(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<bool> seen(static_cast<std::size_t>(dim * dim), false);
  Eigen::Index r = 0, c = 0;
  double re = 0, im = 0;
  Eigen::Index lines = 0;
  while (is >> r >> c >> re >> im) {
    if (r < 0 || r >= dim || c < 0 || c >= dim) throw std::invalid_argument("density text: index out of range");
    if (seen[static_cast<std::size_t>(r * dim + c)]) throw std::invalid_argument("density text: duplicate entry");
    seen[static_cast<std::size_t>(r * dim + c)] = true;
    m(r, c) = cplx(re, im);
    ++lines;
  }
  if (lines != dim * dim) throw std::invalid_argument("density text: expected N^2 entries");
  return {n, m};
}

}  // namespace tempavg
