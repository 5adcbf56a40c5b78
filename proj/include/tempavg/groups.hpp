#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "tempavg/circuit.hpp"
#include "tempavg/density.hpp"
#include "tempavg/gf2.hpp"

namespace tempavg {

/// |k> -> i^<x,k> (-1)^<k,Bk> |k>, x over Z4, B strictly upper triangular.
struct DiagonalElement {
  std::vector<int> x;
  BitMatrix b;

  int n_qubits() const { return static_cast<int>(x.size()); }
  /// Exponent of i applied to basis state k.
  int phase_exponent(std::uint64_t k) const;
};

/// |b> -> |Lb> with b the qubit-ordered bit vector of the basis index.
struct LinearPermElement {
  BitMatrix l;
  int n_qubits() const { return l.rows(); }
};

/// Multiplication by g^k in GF(2^n) (g = x mod the modulus).
struct CyclicElement {
  int n = 0;
  std::uint64_t k = 0;
  std::uint32_t modulus = 0;

  int n_qubits() const { return n; }
  /// The same action as a qubit-ordered linear map.
  BitMatrix matrix() const;
};

/// Clifford element up to global phase: generator j (X_j for j < n, Z_{j-n}
/// otherwise) is mapped to (-1)^x_j sigma_{L e_j}.
struct NormalizerElement {
  BitVector x;
  BitMatrix l;
  int n_qubits() const { return l.rows() / 2; }
};

/// Normalizer element on qubits 0..n-2, applied when `control` is |polarity>.
struct ConditionalNormalizerElement {
  NormalizerElement inner;
  int control = 0;
  int polarity = 1;
  int n_qubits() const { return inner.n_qubits() + 1; }
};

using GroupElement =
    std::variant<DiagonalElement, LinearPermElement, CyclicElement, NormalizerElement, ConditionalNormalizerElement>;

enum class GroupKind { Diagonal, Linear, Cyclic, Normalizer, ConditionalNormalizer };

std::string group_kind_name(GroupKind k);
GroupKind group_kind_from_name(const std::string& s);
int element_qubits(const GroupElement& e);

DiagonalElement sample_diagonal(int n, Rng& rng);
LinearPermElement sample_linear(int n, Rng& rng);
CyclicElement sample_cyclic(int n, Rng& rng);
NormalizerElement sample_normalizer(int n, Rng& rng);
ConditionalNormalizerElement sample_conditional_normalizer(int n, Rng& rng);
GroupElement sample_element(GroupKind kind, int n, Rng& rng);

Circuit element_to_circuit(const GroupElement& e);

/// Pauli label action of a Clifford circuit, computed by dense conjugation
/// of the 2n generators.  Throws std::invalid_argument for non-Clifford
/// gates and std::logic_error if an image is not +-1 times a Pauli.
struct PauliAction {
  BitVector x;
  BitMatrix l;
  friend bool operator==(const PauliAction&, const PauliAction&) = default;
};
PauliAction conjugation_action(const Circuit& c);

/// Hermitian Pauli sigma_b with labels I, Z, X, Y for (x_j, z_j) = 00, 01,
/// 10, 11; b has the X bits first.
Eigen::MatrixXcd pauli_matrix(const BitVector& b);

/// Exhaustive check that distinct index quadruples are separated by the
/// phases of the diagonal group (n <= 3).
bool verify_phase_independence(int n);

/// Every element of the group, as circuits.  Limits: diagonal n <= 3,
/// linear n <= 4, cyclic n <= 8, normalizer n <= 2, conditional n <= 3.
std::vector<Circuit> enumerate_group(GroupKind kind, int n);

/// Exact average of P rho P^dagger, the groups applied in sequence order.
DensityMatrix enumerate_expectation(std::span<const GroupKind> sequence, const DensityMatrix& rho);
DensityMatrix enumerate_expectation(GroupKind kind, const DensityMatrix& rho);

nlohmann::json element_to_json(const GroupElement& e, std::optional<std::uint64_t> seed = std::nullopt);
GroupElement element_from_json(const nlohmann::json& j);

}  // namespace tempavg
