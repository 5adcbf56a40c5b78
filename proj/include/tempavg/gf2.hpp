#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tempavg/rng.hpp"

namespace tempavg {

/// Largest qubit count supported by field arithmetic and dense simulation.
inline constexpr int kMaxFieldDegree = 12;
/// Largest dimension of a BitVector / BitMatrix (one machine word per row).
inline constexpr int kMaxBitDim = 64;

// Fixed-length vector over GF(2). Entry i is bit i of the packed word.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(int len, std::uint64_t bits = 0);

  static BitVector unit(int len, int i);
  static BitVector from_string(const std::string& s);  // "0110", entry 0 first

  int size() const { return len_; }
  bool get(int i) const { return (bits_ >> i) & 1U; }
  void set(int i, bool v);
  void flip(int i) { bits_ ^= std::uint64_t{1} << i; }
  std::uint64_t word() const { return bits_; }
  bool is_zero() const { return bits_ == 0; }
  int weight() const;

  BitVector& operator^=(const BitVector& o);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  /// Inner product modulo 2.
  bool dot(const BitVector& o) const;
  std::string to_string() const;

 private:
  int len_ = 0;
  std::uint64_t bits_ = 0;
};

// Dense matrix over GF(2); row r is a packed word with bit c = entry (r, c).
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols);

  static BitMatrix identity(int n);
  static BitMatrix from_rows(const std::vector<std::vector<int>>& rows);
  static BitMatrix from_columns(std::span<const BitVector> columns);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool get(int r, int c) const { return (data_[r] >> c) & 1U; }
  void set(int r, int c, bool v);
  std::uint64_t row_word(int r) const { return data_[r]; }
  BitVector row(int r) const { return BitVector(cols_, data_[r]); }
  BitVector column(int c) const;
  void set_column(int c, const BitVector& v);

  /// row[target] ^= row[source]
  void add_row(int source, int target) { data_[target] ^= data_[source]; }
  void swap_rows(int a, int b);

  BitMatrix transpose() const;
  BitMatrix operator*(const BitMatrix& o) const;
  BitVector operator*(const BitVector& v) const;
  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

  int rank() const;
  bool is_invertible() const;
  /// Throws std::invalid_argument when singular.
  BitMatrix inverse() const;
  BitMatrix submatrix(int r0, int c0, int nrows, int ncols) const;
  bool is_identity() const;

  std::vector<std::vector<int>> to_rows() const;
  std::string to_string() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Solution set {particular + span(basis)} of A y = t; particular is empty
/// when the system is inconsistent.
struct AffineSpace {
  std::optional<BitVector> particular;
  std::vector<BitVector> basis;
};

AffineSpace solve_affine(const BitMatrix& a, const BitVector& t);

/// Elementary row operation: row[target] ^= row[source].  Under the state
/// convention |b> -> |Lb>, this is CNOT(control = source, target = target).
struct RowOp {
  int source = 0;
  int target = 0;
  friend bool operator==(const RowOp&, const RowOp&) = default;
};

/// Decomposes an invertible L into row operations o_1..o_m such that
/// E(o_m)...E(o_1) = L, i.e. applying the ops in order to the identity
/// reproduces L.
std::vector<RowOp> gaussian_decompose(const BitMatrix& l);

/// Applies ops in order to the identity.
BitMatrix compose_row_ops(int n, std::span<const RowOp> ops);

BitMatrix random_invertible(int n, Rng& rng);

// --- symplectic structure on Pauli labels -----------------------------------

/// Block form [[0, I], [I, 0]] on 2n coordinates; coordinate j < n is the X
/// bit of qubit j, coordinate n + j its Z bit.
BitMatrix symplectic_form(int n_qubits);
bool is_symplectic(const BitMatrix& l);

/// Uniform sample from the symplectic group, built column by column.
BitMatrix random_symplectic(int n_qubits, Rng& rng);

/// Product formula for the number of symplectic 2n x 2n matrices.
boost::multiprecision::cpp_int symplectic_count(int n_qubits);

/// All symplectic matrices by exhaustive search (n_qubits <= 2).
std::vector<BitMatrix> enumerate_symplectic(int n_qubits);

/// All invertible n x n matrices by exhaustive search (n <= 4).
std::vector<BitMatrix> enumerate_invertible(int n);

// --- GF(2^n) ----------------------------------------------------------------

/// Lexicographically smallest primitive polynomial of each degree 1..16, as
/// bit masks (bit i = coefficient of x^i).
std::span<const std::uint32_t> primitive_polynomial_table();
std::uint32_t primitive_polynomial(int n);

/// Element of GF(2^n) in polynomial basis: bit i of `bits` is the
/// coefficient of x^i.  Identified with computational basis state |bits>.
struct GF2nElement {
  std::uint32_t bits = 0;
  std::uint32_t modulus = 0;

  int degree() const;
  bool is_zero() const { return bits == 0; }
  BitVector coeffs() const { return BitVector(degree(), bits); }
  friend bool operator==(const GF2nElement&, const GF2nElement&) = default;
};

class GF2nField {
 public:
  /// Uses the tabulated primitive polynomial.
  explicit GF2nField(int n);
  /// Throws std::invalid_argument unless `modulus` is primitive of degree n.
  GF2nField(int n, std::uint32_t modulus);

  int degree() const { return n_; }
  std::uint32_t modulus() const { return modulus_; }
  std::uint32_t order() const { return std::uint32_t{1} << n_; }

  GF2nElement element(std::uint32_t bits) const;
  GF2nElement one() const { return element(1); }
  GF2nElement generator() const;
  GF2nElement pow(const GF2nElement& a, std::uint64_t e) const;
  /// Smallest k > 0 with a^k = 1; a must be nonzero.
  std::uint64_t multiplicative_order(const GF2nElement& a) const;

 private:
  int n_;
  std::uint32_t modulus_;
};

GF2nElement gf2n_mul(const GF2nElement& a, const GF2nElement& b);
GF2nElement gf2n_generator(int n);
/// True iff `modulus` has degree n and x generates the multiplicative group.
bool is_primitive_polynomial(std::uint32_t modulus, int n);

/// L with L * coeffs(b) = coeffs(a * b) (coefficient order: row i is x^i).
BitMatrix multiplication_matrix(const GF2nElement& a);

/// Reindexes a matrix from coefficient order to qubit order, where qubit q
/// carries the coefficient of x^(n-1-q) (qubit 0 is the most significant
/// bit of the basis index).
BitMatrix to_qubit_order(const BitMatrix& coeff_matrix);

/// Bits of basis index `k` as a qubit-ordered vector (entry q = qubit q).
BitVector basis_bits(std::uint64_t k, int n);
std::uint64_t basis_index(const BitVector& bits);

}  // namespace tempavg
