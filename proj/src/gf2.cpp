#include "tempavg/gf2.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace tempavg {

namespace {

std::uint64_t low_mask(int len) {
  return len >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << len) - 1);
}

void check_dim(int len, const char* what) {
  if (len < 0 || len > kMaxBitDim) {
    throw std::invalid_argument(std::string(what) + ": dimension out of range");
  }
}

// Incrementally maintained row-echelon basis, used for span membership.
class EchelonBasis {
 public:
  std::uint64_t reduce(std::uint64_t v) const {
    for (const auto& [pivot, row] : rows_) {
      if ((v >> pivot) & 1U) v ^= row;
    }
    return v;
  }
  bool contains(std::uint64_t v) const { return reduce(v) == 0; }
  // Returns false if v was already in the span.
  bool insert(std::uint64_t v) {
    v = reduce(v);
    if (v == 0) return false;
    const int pivot = std::countr_zero(v);
    for (auto& [p, row] : rows_) {
      if ((row >> pivot) & 1U) row ^= v;
    }
    rows_.emplace_back(pivot, v);
    return true;
  }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::pair<int, std::uint64_t>> rows_;
};

constexpr std::array<std::uint32_t, 16> kPrimitive = {
    0x3,   0x7,   0xb,    0x13,   0x25,   0x43,   0x83,   0x11d,
    0x211, 0x409, 0x805, 0x1053, 0x201b, 0x402b, 0x8003, 0x1002d};

std::uint32_t mul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t modulus, int n) {
  std::uint32_t acc = 0;
  while (b != 0) {
    if (b & 1U) acc ^= a;
    b >>= 1;
    a <<= 1;
    if ((a >> n) & 1U) a ^= modulus;
  }
  return acc;
}

int degree_of(std::uint32_t modulus) {
  return modulus == 0 ? -1 : 31 - std::countl_zero(modulus);
}

}  // namespace

// --- BitVector --------------------------------------------------------------

BitVector::BitVector(int len, std::uint64_t bits) : len_(len), bits_(bits & low_mask(len)) {
  check_dim(len, "BitVector");
}

BitVector BitVector::unit(int len, int i) {
  BitVector v(len);
  v.set(i, true);
  return v;
}

BitVector BitVector::from_string(const std::string& s) {
  BitVector v(static_cast<int>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("BitVector: bad digit");
    v.set(static_cast<int>(i), s[i] == '1');
  }
  return v;
}

void BitVector::set(int i, bool v) {
  if (i < 0 || i >= len_) throw std::out_of_range("BitVector index");
  const std::uint64_t m = std::uint64_t{1} << i;
  bits_ = v ? (bits_ | m) : (bits_ & ~m);
}

int BitVector::weight() const { return std::popcount(bits_); }

BitVector& BitVector::operator^=(const BitVector& o) {
  if (o.len_ != len_) throw std::invalid_argument("BitVector length mismatch");
  bits_ ^= o.bits_;
  return *this;
}

bool BitVector::dot(const BitVector& o) const {
  if (o.len_ != len_) throw std::invalid_argument("BitVector length mismatch");
  return std::popcount(bits_ & o.bits_) & 1;
}

std::string BitVector::to_string() const {
  std::string s(static_cast<std::size_t>(len_), '0');
  for (int i = 0; i < len_; ++i) s[i] = get(i) ? '1' : '0';
  return s;
}

// --- BitMatrix --------------------------------------------------------------

BitMatrix::BitMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  check_dim(rows, "BitMatrix rows");
  check_dim(cols, "BitMatrix cols");
  data_.assign(static_cast<std::size_t>(rows), 0);
}

BitMatrix BitMatrix::identity(int n) {
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, true);
  return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
  BitMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw std::invalid_argument("ragged BitMatrix rows");
    for (int j = 0; j < c; ++j) {
      if (rows[i][j] != 0 && rows[i][j] != 1) throw std::invalid_argument("BitMatrix entry not 0/1");
      m.set(i, j, rows[i][j] == 1);
    }
  }
  return m;
}

BitMatrix BitMatrix::from_columns(std::span<const BitVector> columns) {
  if (columns.empty()) throw std::invalid_argument("from_columns: no columns");
  BitMatrix m(columns.front().size(), static_cast<int>(columns.size()));
  for (int c = 0; c < m.cols(); ++c) m.set_column(c, columns[c]);
  return m;
}

void BitMatrix::set(int r, int c, bool v) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("BitMatrix index");
  const std::uint64_t m = std::uint64_t{1} << c;
  data_[r] = v ? (data_[r] | m) : (data_[r] & ~m);
}

BitVector BitMatrix::column(int c) const {
  BitVector v(rows_);
  for (int r = 0; r < rows_; ++r) v.set(r, get(r, c));
  return v;
}

void BitMatrix::set_column(int c, const BitVector& v) {
  if (v.size() != rows_) throw std::invalid_argument("set_column: length mismatch");
  for (int r = 0; r < rows_; ++r) set(r, c, v.get(r));
}

void BitMatrix::swap_rows(int a, int b) { std::swap(data_[a], data_[b]); }

BitMatrix BitMatrix::transpose() const {
  BitMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (get(r, c)) t.set(c, r, true);
  return t;
}

BitMatrix BitMatrix::operator*(const BitMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("BitMatrix product: shape mismatch");
  BitMatrix p(rows_, o.cols_);
  for (int r = 0; r < rows_; ++r) {
    std::uint64_t acc = 0;
    std::uint64_t row = data_[r];
    while (row != 0) {
      const int k = std::countr_zero(row);
      acc ^= o.data_[k];
      row &= row - 1;
    }
    p.data_[r] = acc;
  }
  return p;
}

BitVector BitMatrix::operator*(const BitVector& v) const {
  if (v.size() != cols_) throw std::invalid_argument("BitMatrix * BitVector: shape mismatch");
  BitVector out(rows_);
  for (int r = 0; r < rows_; ++r) out.set(r, std::popcount(data_[r] & v.word()) & 1);
  return out;
}

int BitMatrix::rank() const {
  EchelonBasis basis;
  for (auto row : data_) basis.insert(row);
  return static_cast<int>(basis.size());
}

bool BitMatrix::is_invertible() const { return rows_ == cols_ && rank() == rows_; }

BitMatrix BitMatrix::inverse() const {
  if (rows_ != cols_) throw std::invalid_argument("inverse: matrix not square");
  BitMatrix a = *this;
  BitMatrix inv = identity(rows_);
  for (int c = 0; c < cols_; ++c) {
    int pivot = -1;
    for (int r = c; r < rows_; ++r) {
      if (a.get(r, c)) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw std::invalid_argument("inverse: matrix is singular");
    a.swap_rows(pivot, c);
    inv.swap_rows(pivot, c);
    for (int r = 0; r < rows_; ++r) {
      if (r != c && a.get(r, c)) {
        a.add_row(c, r);
        inv.add_row(c, r);
      }
    }
  }
  return inv;
}

BitMatrix BitMatrix::submatrix(int r0, int c0, int nrows, int ncols) const {
  BitMatrix s(nrows, ncols);
  for (int r = 0; r < nrows; ++r)
    for (int c = 0; c < ncols; ++c) s.set(r, c, get(r0 + r, c0 + c));
  return s;
}

bool BitMatrix::is_identity() const { return rows_ == cols_ && *this == identity(rows_); }

std::vector<std::vector<int>> BitMatrix::to_rows() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(rows_), std::vector<int>(cols_));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out[r][c] = get(r, c) ? 1 : 0;
  return out;
}

std::string BitMatrix::to_string() const {
  std::ostringstream os;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) os << (get(r, c) ? '1' : '0');
    os << '\n';
  }
  return os.str();
}

// --- linear systems ---------------------------------------------------------

AffineSpace solve_affine(const BitMatrix& a, const BitVector& t) {
  if (t.size() != a.rows()) throw std::invalid_argument("solve_affine: rhs length mismatch");
  const int n = a.cols();
  if (n >= 64) {
    // The augmented column needs a spare bit.
    throw std::invalid_argument("solve_affine: too many unknowns");
  }
  const std::uint64_t rhs_bit = std::uint64_t{1} << n;
  std::vector<std::uint64_t> rows;
  rows.reserve(static_cast<std::size_t>(a.rows()));
  for (int r = 0; r < a.rows(); ++r) rows.push_back(a.row_word(r) | (t.get(r) ? rhs_bit : 0));

  std::vector<int> pivot_col;
  std::size_t next = 0;
  for (int c = 0; c < n && next < rows.size(); ++c) {
    std::size_t p = next;
    while (p < rows.size() && !((rows[p] >> c) & 1U)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[next]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != next && ((rows[r] >> c) & 1U)) rows[r] ^= rows[next];
    }
    pivot_col.push_back(c);
    ++next;
  }
  AffineSpace out;
  for (std::size_t r = next; r < rows.size(); ++r) {
    if (rows[r] & rhs_bit) return out;  // 0 = 1
  }
  BitVector particular(n);
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) {
    is_pivot[pivot_col[i]] = true;
    particular.set(pivot_col[i], rows[i] & rhs_bit);
  }
  out.particular = particular;
  for (int f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    BitVector v = BitVector::unit(n, f);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) {
      if ((rows[i] >> f) & 1U) v.set(pivot_col[i], true);
    }
    out.basis.push_back(v);
  }
  return out;
}

std::vector<RowOp> gaussian_decompose(const BitMatrix& l) {
  if (!l.is_invertible()) throw std::invalid_argument("gaussian_decompose: matrix is singular");
  const int n = l.rows();
  BitMatrix a = l;
  std::vector<RowOp> reduction;
  auto apply = [&](int source, int target) {
    a.add_row(source, target);
    reduction.push_back({source, target});
  };
  for (int c = 0; c < n; ++c) {
    if (!a.get(c, c)) {
      int r = c + 1;
      while (!a.get(r, c)) ++r;
      apply(r, c);
    }
    for (int r = 0; r < n; ++r) {
      if (r != c && a.get(r, c)) apply(c, r);
    }
  }
  // Reduction R_p ... R_1 L = I and each R is an involution, so
  // L = R_1 ... R_p: applying R_p first reproduces L.
  std::reverse(reduction.begin(), reduction.end());
  return reduction;
}

BitMatrix compose_row_ops(int n, std::span<const RowOp> ops) {
  BitMatrix m = BitMatrix::identity(n);
  for (const auto& op : ops) m.add_row(op.source, op.target);
  return m;
}

BitMatrix random_invertible(int n, Rng& rng) {
  if (n < 1 || n > kMaxBitDim) throw std::invalid_argument("random_invertible: n out of range");
  BitMatrix m(n, n);
  EchelonBasis span;
  for (int c = 0; c < n; ++c) {
    std::uint64_t v = 0;
    do {
      v = random_bits(rng, n);
    } while (span.contains(v));
    span.insert(v);
    m.set_column(c, BitVector(n, v));
  }
  return m;
}

// --- symplectic -------------------------------------------------------------

BitMatrix symplectic_form(int n_qubits) {
  if (n_qubits < 1 || 2 * n_qubits > kMaxBitDim) throw std::invalid_argument("symplectic_form: n out of range");
  BitMatrix m(2 * n_qubits, 2 * n_qubits);
  for (int j = 0; j < n_qubits; ++j) {
    m.set(j, n_qubits + j, true);
    m.set(n_qubits + j, j, true);
  }
  return m;
}

bool is_symplectic(const BitMatrix& l) {
  if (l.rows() != l.cols() || l.rows() % 2 != 0 || l.rows() == 0) return false;
  const BitMatrix m = symplectic_form(l.rows() / 2);
  return l.transpose() * m * l == m;
}

BitMatrix random_symplectic(int n_qubits, Rng& rng) {
  const BitMatrix m = symplectic_form(n_qubits);
  const int dim = 2 * n_qubits;
  std::vector<BitVector> cols;
  cols.reserve(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    // Constraints: cols[j]^T M y = M(k, j) for every j < k.
    BitVector y(dim);
    if (k == 0) {
      do {
        y = BitVector(dim, random_bits(rng, dim));
      } while (y.is_zero());
      cols.push_back(y);
      continue;
    }
    BitMatrix a(k, dim);
    BitVector t(k);
    for (int j = 0; j < k; ++j) {
      const BitVector mj = m * cols[j];
      for (int c = 0; c < dim; ++c) a.set(j, c, mj.get(c));
      t.set(j, m.get(k, j));
    }
    const AffineSpace sol = solve_affine(a, t);
    if (!sol.particular) throw std::logic_error("random_symplectic: inconsistent constraints");
    if (k < n_qubits) {
      // The solution space is linear and contains span(cols); pick a point
      // outside that span via a complement S_1..S_{2n-2k}.
      EchelonBasis span;
      for (const auto& c : cols) span.insert(c.word());
      std::vector<BitVector> complement;
      for (const auto& b : sol.basis) {
        if (span.insert(b.word())) complement.push_back(b);
      }
      const int s = static_cast<int>(complement.size());
      std::uint64_t coef = 0;
      do {
        coef = random_bits(rng, s);
      } while (coef == 0);
      for (int i = 0; i < s; ++i)
        if ((coef >> i) & 1U) y ^= complement[i];
      const std::uint64_t lcoef = random_bits(rng, k);
      for (int i = 0; i < k; ++i)
        if ((lcoef >> i) & 1U) y ^= cols[i];
    } else {
      // No solution lies in span(cols); any point of the affine space works.
      y = *sol.particular;
      const int s = static_cast<int>(sol.basis.size());
      const std::uint64_t coef = random_bits(rng, s);
      for (int i = 0; i < s; ++i)
        if ((coef >> i) & 1U) y ^= sol.basis[i];
    }
    cols.push_back(y);
  }
  return BitMatrix::from_columns(cols);
}

boost::multiprecision::cpp_int symplectic_count(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("symplectic_count: n must be positive");
  using boost::multiprecision::cpp_int;
  const int n = n_qubits;
  cpp_int total = 1;
  for (int k = 0; k < n; ++k) total *= (cpp_int(1) << (2 * n - k)) - (cpp_int(1) << k);
  for (int k = 0; k < n; ++k) total *= cpp_int(1) << (n - k);
  return total;
}

std::vector<BitMatrix> enumerate_symplectic(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 2) throw std::invalid_argument("enumerate_symplectic: n_qubits must be 1 or 2");
  const int dim = 2 * n_qubits;
  const BitMatrix m = symplectic_form(n_qubits);
  std::vector<BitMatrix> out;
  const std::uint64_t total = std::uint64_t{1} << (dim * dim);
  for (std::uint64_t code = 0; code < total; ++code) {
    BitMatrix l(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) l.set(r, c, (code >> (r * dim + c)) & 1U);
    if (l.transpose() * m * l == m) out.push_back(l);
  }
  return out;
}

std::vector<BitMatrix> enumerate_invertible(int n) {
  if (n < 1 || n > 4) throw std::invalid_argument("enumerate_invertible: n must be in [1, 4]");
  std::vector<BitMatrix> out;
  const std::uint64_t total = std::uint64_t{1} << (n * n);
  for (std::uint64_t code = 0; code < total; ++code) {
    BitMatrix l(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) l.set(r, c, (code >> (r * n + c)) & 1U);
    if (l.is_invertible()) out.push_back(l);
  }
  return out;
}

// --- GF(2^n) ----------------------------------------------------------------

std::span<const std::uint32_t> primitive_polynomial_table() { return kPrimitive; }

std::uint32_t primitive_polynomial(int n) {
  if (n < 1 || n > static_cast<int>(kPrimitive.size())) throw std::invalid_argument("primitive_polynomial: degree out of range");
  return kPrimitive[static_cast<std::size_t>(n - 1)];
}

bool is_primitive_polynomial(std::uint32_t modulus, int n) {
  if (n < 1 || n > 31 || degree_of(modulus) != n) return false;
  if ((modulus & 1U) == 0) return false;  // x divides the modulus
  const std::uint32_t group_order = (std::uint32_t{1} << n) - 1;
  const std::uint32_t x = n == 1 ? (2U ^ modulus) : 2U;
  std::uint32_t v = x;
  for (std::uint32_t k = 1; k <= group_order; ++k) {
    if (v == 1) return k == group_order;
    if (v == 0) return false;
    v = mul_mod(v, x, modulus, n);
  }
  return false;
}

int GF2nElement::degree() const { return degree_of(modulus); }

GF2nField::GF2nField(int n) : GF2nField(n, primitive_polynomial(n)) {}

GF2nField::GF2nField(int n, std::uint32_t modulus) : n_(n), modulus_(modulus) {
  if (n < 1 || n > 16) throw std::invalid_argument("GF2nField: degree out of range");
  if (!is_primitive_polynomial(modulus, n)) throw std::invalid_argument("GF2nField: modulus is not primitive");
}

GF2nElement GF2nField::element(std::uint32_t bits) const {
  if (bits >= order()) throw std::invalid_argument("GF2nField: element out of range");
  return {bits, modulus_};
}

GF2nElement GF2nField::generator() const {
  // x reduced modulo the primitive polynomial (for n = 1 this is 1).
  return element(n_ == 1 ? 1U : 2U);
}

GF2nElement GF2nField::pow(const GF2nElement& a, std::uint64_t e) const {
  GF2nElement result = one();
  GF2nElement base = a;
  while (e != 0) {
    if (e & 1U) result = gf2n_mul(result, base);
    base = gf2n_mul(base, base);
    e >>= 1;
  }
  return result;
}

std::uint64_t GF2nField::multiplicative_order(const GF2nElement& a) const {
  if (a.is_zero()) throw std::invalid_argument("multiplicative_order: zero element");
  GF2nElement v = a;
  std::uint64_t k = 1;
  while (v.bits != 1) {
    v = gf2n_mul(v, a);
    ++k;
  }
  return k;
}

GF2nElement gf2n_mul(const GF2nElement& a, const GF2nElement& b) {
  if (a.modulus != b.modulus) throw std::invalid_argument("gf2n_mul: modulus mismatch");
  const int n = a.degree();
  if (n < 1) throw std::invalid_argument("gf2n_mul: invalid modulus");
  return {mul_mod(a.bits, b.bits, a.modulus, n), a.modulus};
}

GF2nElement gf2n_generator(int n) {
  if (n < 1 || n > kMaxFieldDegree) throw std::invalid_argument("gf2n_generator: n out of range");
  return GF2nField(n).generator();
}

BitMatrix multiplication_matrix(const GF2nElement& a) {
  if (a.is_zero()) throw std::invalid_argument("multiplication_matrix: zero element is not invertible");
  const int n = a.degree();
  BitMatrix l(n, n);
  for (int j = 0; j < n; ++j) {
    const GF2nElement basis{std::uint32_t{1} << j, a.modulus};
    l.set_column(j, gf2n_mul(a, basis).coeffs());
  }
  return l;
}

BitMatrix to_qubit_order(const BitMatrix& coeff_matrix) {
  const int n = coeff_matrix.rows();
  BitMatrix q(n, coeff_matrix.cols());
  const int m = coeff_matrix.cols();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) q.set(n - 1 - r, m - 1 - c, coeff_matrix.get(r, c));
  return q;
}

BitVector basis_bits(std::uint64_t k, int n) {
  BitVector v(n);
  for (int q = 0; q < n; ++q) v.set(q, (k >> (n - 1 - q)) & 1U);
  return v;
}

std::uint64_t basis_index(const BitVector& bits) {
  const int n = bits.size();
  std::uint64_t k = 0;
  for (int q = 0; q < n; ++q)
    if (bits.get(q)) k |= std::uint64_t{1} << (n - 1 - q);
  return k;
}

}  // namespace tempavg
