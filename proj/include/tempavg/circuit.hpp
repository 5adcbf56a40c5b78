#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace tempavg {

using cplx = std::complex<double>;

enum class GateKind {
  Not,
  Cnot,         // qubits {control, target}
  Cz,           // qubits {a, b}
  PhaseS,       // diag(1, i)
  RotY90,       // exp(-i pi/4 Y) = [[c, -s], [s, c]]
  Swap,
  GenToffoli,   // qubits {controls..., target}; polarity per control
  Conditioned,  // qubits {control}; inner circuit on the full register
  PermPhase,    // |k> -> i^phases[k] |perm[k]> on the listed sub-register
};

std::string gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& s);

class Circuit;

struct Gate {
  GateKind kind = GateKind::Not;
  std::vector<int> qubits;
  std::vector<int> polarity;
  std::vector<std::uint32_t> perm;
  std::vector<int> phases;  // Z4 exponents
  std::shared_ptr<const Circuit> inner;

  static Gate x(int q);
  static Gate cnot(int control, int target);
  static Gate cz(int a, int b);
  static Gate s(int q);
  static Gate ry90(int q);
  static Gate swap(int a, int b);
  /// Flips `target` when every control i is in state polarity[i].
  static Gate toffoli(std::vector<int> controls, std::vector<int> polarity, int target);
  /// Applies `inner` on the subspace where `control` is in state `polarity`.
  static Gate conditioned(int control, int polarity, Circuit inner);
  /// qubits[0] is the most significant bit of the sub-register index.
  static Gate perm_phase(std::vector<int> qubits, std::vector<std::uint32_t> perm, std::vector<int> phases);

  /// Qubits read or written, including those of a conditioned inner circuit.
  std::vector<int> support() const;
  bool is_clifford() const;
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n_qubits);

  int n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }
  bool empty() const { return gates_.empty(); }
  std::size_t count(GateKind k) const;

  /// Validates indices and appends.
  Circuit& add(Gate g);
  Circuit& append(const Circuit& other);

  /// Same gates on a register of n_total >= n_qubits qubits.
  Circuit widened(int n_total) const;

 private:
  int n_ = 0;
  std::vector<Gate> gates_;
};

/// In-place action on a state vector of 2^n amplitudes (qubit 0 = MSB).
void apply_gate(std::span<cplx> psi, int n_qubits, const Gate& g);
void apply_circuit(std::span<cplx> psi, const Circuit& c);

/// Dense unitary; column k is the image of |k>.
Eigen::MatrixXcd unitary(const Circuit& c);

nlohmann::json circuit_to_json(const Circuit& c);
/// Throws std::invalid_argument on malformed input.
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace tempavg
