#include "tempavg/groups.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace tempavg {

namespace {

// i^e X^x Z^z with bit q of x/z referring to qubit q.
struct XZ {
  int e = 0;
  std::uint64_t x = 0;
  std::uint64_t z = 0;
};

XZ mul(const XZ& a, const XZ& b) {
  return {(a.e + b.e + 2 * std::popcount(a.z & b.x)) & 3, a.x ^ b.x, a.z ^ b.z};
}

XZ bit_x(int q) { return {0, std::uint64_t{1} << q, 0}; }
XZ bit_z(int q) { return {0, 0, std::uint64_t{1} << q}; }

// Image of X_q (is_z = false) or Z_q under conjugation by a Clifford gate.
XZ gate_image(const Gate& g, bool is_z, int q) {
  const XZ self = is_z ? bit_z(q) : bit_x(q);
  const auto& qs = g.qubits;
  if (std::find(qs.begin(), qs.end(), q) == qs.end()) return self;
  switch (g.kind) {
    case GateKind::Not:
      return is_z ? XZ{2, 0, self.z} : self;
    case GateKind::PhaseS:
      return is_z ? self : XZ{1, self.x, std::uint64_t{1} << q};
    case GateKind::RotY90:
      return is_z ? bit_x(q) : XZ{2, 0, std::uint64_t{1} << q};
    case GateKind::Cnot: {
      const int c = qs[0], t = qs[1];
      if (!is_z && q == c) return mul(bit_x(c), bit_x(t));
      if (is_z && q == t) return mul(bit_z(c), bit_z(t));
      return self;
    }
    case GateKind::Cz: {
      if (is_z) return self;
      const int other = qs[0] == q ? qs[1] : qs[0];
      return mul(bit_x(q), bit_z(other));
    }
    case GateKind::Swap: {
      const int other = qs[0] == q ? qs[1] : qs[0];
      return is_z ? bit_z(other) : bit_x(other);
    }
    case GateKind::GenToffoli:
      if (qs.size() == 1) return is_z ? XZ{2, 0, self.z} : self;
      if (qs.size() == 2 && g.polarity[0] == 1) {
        const int c = qs[0], t = qs[1];
        if (!is_z && q == c) return mul(bit_x(c), bit_x(t));
        if (is_z && q == t) return mul(bit_z(c), bit_z(t));
        return self;
      }
      break;
    default:
      break;
  }
  throw std::invalid_argument("gate " + gate_kind_name(g.kind) + " is not supported by the Pauli tracker");
}

// Sign-tracking images of the 2n generators.
class PauliTracker {
 public:
  explicit PauliTracker(int n) : n_(n), img_(static_cast<std::size_t>(2 * n)) {
    for (int q = 0; q < n; ++q) {
      img_[q] = bit_x(q);
      img_[n + q] = bit_z(q);
    }
  }

  void apply(const Gate& g) {
    for (auto& p : img_) {
      XZ out{p.e, 0, 0};
      for (int q = 0; q < n_; ++q)
        if ((p.x >> q) & 1U) out = mul(out, gate_image(g, false, q));
      for (int q = 0; q < n_; ++q)
        if ((p.z >> q) & 1U) out = mul(out, gate_image(g, true, q));
      p = out;
    }
  }

  PauliAction action() const {
    PauliAction a{BitVector(2 * n_), BitMatrix(2 * n_, 2 * n_)};
    for (int j = 0; j < 2 * n_; ++j) {
      const XZ& p = img_[j];
      const int s = (p.e - std::popcount(p.x & p.z)) & 3;
      if (s % 2 != 0) throw std::logic_error("Pauli tracker: non-Hermitian image");
      a.x.set(j, s == 2);
      for (int q = 0; q < n_; ++q) {
        a.l.set(q, j, (p.x >> q) & 1U);
        a.l.set(n_ + q, j, (p.z >> q) & 1U);
      }
    }
    return a;
  }

 private:
  int n_;
  std::vector<XZ> img_;
};

PauliAction tracked_action(const Circuit& c) {
  PauliTracker t(c.n_qubits());
  for (const auto& g : c.gates()) t.apply(g);
  return t.action();
}

// Gates whose label maps are used by the reduction below.
enum class Step { H, S, HSH, Cnot, Swap };

struct Op {
  Step step;
  int a;
  int b;
};

void apply_label_map(BitMatrix& t, int n, const Op& op) {
  switch (op.step) {
    case Step::H:
      t.swap_rows(op.a, n + op.a);
      break;
    case Step::S:
      t.add_row(op.a, n + op.a);
      break;
    case Step::HSH:
      t.add_row(n + op.a, op.a);
      break;
    case Step::Cnot:
      t.add_row(op.a, op.b);
      t.add_row(n + op.b, n + op.a);
      break;
    case Step::Swap:
      t.swap_rows(op.a, op.b);
      t.swap_rows(n + op.a, n + op.b);
      break;
  }
}

void emit(Circuit& c, const Op& op) {
  switch (op.step) {
    case Step::H:
      c.add(Gate::ry90(op.a));
      break;
    case Step::S:
      c.add(Gate::s(op.a));
      break;
    case Step::HSH:
      c.add(Gate::ry90(op.a)).add(Gate::s(op.a)).add(Gate::ry90(op.a));
      break;
    case Step::Cnot:
      c.add(Gate::cnot(op.a, op.b));
      break;
    case Step::Swap:
      c.add(Gate::swap(op.a, op.b));
      break;
  }
}

// Reduces L to the identity with left multiplications; all maps used are
// involutions, so the reversed list realizes L.
Circuit synthesize_label_map(const BitMatrix& l) {
  const int n = l.rows() / 2;
  BitMatrix t = l;
  std::vector<Op> ops;
  auto run = [&](Op op) {
    apply_label_map(t, n, op);
    ops.push_back(op);
  };
  auto xb = [&](int j, int col) { return t.get(j, col); };
  auto zb = [&](int j, int col) { return t.get(n + j, col); };
  for (int q = 0; q < n; ++q) {
    // Column q becomes X_q.
    for (int j = q; j < n; ++j) {
      if (!xb(j, q) && zb(j, q)) run({Step::H, j, 0});
      else if (xb(j, q) && zb(j, q)) run({Step::S, j, 0});
    }
    if (!xb(q, q)) {
      int j = q + 1;
      while (j < n && !xb(j, q)) ++j;
      if (j == n) throw std::logic_error("normalizer synthesis: matrix is not symplectic");
      run({Step::Swap, q, j});
    }
    for (int j = q + 1; j < n; ++j)
      if (xb(j, q)) run({Step::Cnot, q, j});
    // Column n + q becomes Z_q.
    const int c = n + q;
    for (int j = q + 1; j < n; ++j) {
      if (xb(j, c) && !zb(j, c)) {
        run({Step::H, j, 0});
      } else if (xb(j, c) && zb(j, c)) {
        run({Step::S, j, 0});
        run({Step::H, j, 0});
      }
    }
    for (int j = q + 1; j < n; ++j)
      if (zb(j, c)) run({Step::Cnot, j, q});
    if (xb(q, c)) run({Step::HSH, q, 0});
  }
  if (!t.is_identity()) throw std::logic_error("normalizer synthesis: reduction did not reach the identity");
  Circuit circ(n);
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) emit(circ, *it);
  return circ;
}

Circuit normalizer_circuit(const NormalizerElement& e) {
  const int n = e.n_qubits();
  if (e.l.rows() != 2 * n || e.l.cols() != 2 * n || e.x.size() != 2 * n || !is_symplectic(e.l))
    throw std::invalid_argument("normalizer element: malformed (x, L)");
  const Circuit body = synthesize_label_map(e.l);
  const PauliAction got = tracked_action(body);
  if (got.l != e.l) throw std::logic_error("normalizer synthesis: label map mismatch");
  // Prepending sigma_p flips the sign of generator j iff (Mp)_j = 1.
  const BitVector p = symplectic_form(n) * (e.x ^ got.x);
  Circuit c(n);
  for (int q = 0; q < n; ++q) {
    if (p.get(q)) c.add(Gate::x(q));
    if (p.get(n + q)) c.add(Gate::s(q)).add(Gate::s(q));
  }
  c.append(body);
  const PauliAction check = tracked_action(c);
  if (check.x != e.x || check.l != e.l) throw std::logic_error("normalizer synthesis: sign correction failed");
  return c;
}

Circuit linear_circuit(const BitMatrix& l) {
  if (l.rows() != l.cols() || !l.is_invertible()) throw std::invalid_argument("linear element: L must be invertible");
  Circuit c(l.rows());
  for (const auto& op : gaussian_decompose(l)) c.add(Gate::cnot(op.source, op.target));
  return c;
}

Circuit diagonal_circuit(const DiagonalElement& e) {
  const int n = e.n_qubits();
  if (n < 1 || e.b.rows() != n || e.b.cols() != n) throw std::invalid_argument("diagonal element: shape mismatch");
  Circuit c(n);
  for (int j = 0; j < n; ++j) {
    if (e.x[j] < 0 || e.x[j] > 3) throw std::invalid_argument("diagonal element: x must be in Z4");
    if (e.x[j] != 0) c.add(Gate::perm_phase({j}, {0, 1}, {0, e.x[j]}));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!e.b.get(i, j)) continue;
      if (i >= j) throw std::invalid_argument("diagonal element: B must be strictly upper triangular");
      c.add(Gate::cz(i, j));
    }
  return c;
}

Circuit conditional_circuit(const ConditionalNormalizerElement& e) {
  const int n = e.n_qubits();
  if (e.control != n - 1 || e.polarity != 1)
    throw std::invalid_argument("conditional normalizer: control must be the last qubit with polarity 1");
  Circuit c(n);
  c.add(Gate::conditioned(e.control, e.polarity, normalizer_circuit(e.inner).widened(n)));
  return c;
}

std::vector<BitMatrix> all_strict_upper(int n) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::vector<BitMatrix> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << slots.size()); ++code) {
    BitMatrix b(n, n);
    for (std::size_t s = 0; s < slots.size(); ++s) b.set(slots[s].first, slots[s].second, (code >> s) & 1U);
    out.push_back(b);
  }
  return out;
}

std::vector<DiagonalElement> all_diagonal(int n) {
  std::vector<DiagonalElement> out;
  const auto bs = all_strict_upper(n);
  const std::uint64_t nx = std::uint64_t{1} << (2 * n);
  for (std::uint64_t code = 0; code < nx; ++code) {
    std::vector<int> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) x[j] = static_cast<int>((code >> (2 * j)) & 3U);
    for (const auto& b : bs) out.push_back({x, b});
  }
  return out;
}

std::vector<NormalizerElement> all_normalizer(int n) {
  std::vector<NormalizerElement> out;
  for (const auto& l : enumerate_symplectic(n))
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << (2 * n)); ++x) out.push_back({BitVector(2 * n, x), l});
  return out;
}

nlohmann::json matrix_json(const BitMatrix& m) { return m.to_rows(); }

BitMatrix matrix_from_json(const nlohmann::json& j) { return BitMatrix::from_rows(j.get<std::vector<std::vector<int>>>()); }

}  // namespace

int DiagonalElement::phase_exponent(std::uint64_t k) const {
  const int n = n_qubits();
  auto bit = [&](int j) { return static_cast<int>((k >> (n - 1 - j)) & 1U); };
  int e = 0;
  for (int j = 0; j < n; ++j) e += x[j] * bit(j);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (b.get(i, j)) e += 2 * bit(i) * bit(j);
  return e & 3;
}

BitMatrix CyclicElement::matrix() const {
  GF2nField f(n, modulus);
  const std::uint64_t period = f.order() - 1;
  return to_qubit_order(multiplication_matrix(f.pow(f.generator(), k % period)));
}

std::string group_kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::Diagonal:
      return "diagonal";
    case GroupKind::Linear:
      return "linear";
    case GroupKind::Cyclic:
      return "cyclic";
    case GroupKind::Normalizer:
      return "normalizer";
    case GroupKind::ConditionalNormalizer:
      return "conditional_normalizer";
  }
  throw std::invalid_argument("unknown group kind");
}

GroupKind group_kind_from_name(const std::string& s) {
  for (auto k : {GroupKind::Diagonal, GroupKind::Linear, GroupKind::Cyclic, GroupKind::Normalizer,
                 GroupKind::ConditionalNormalizer})
    if (group_kind_name(k) == s) return k;
  throw std::invalid_argument("unknown group: " + s);
}

int element_qubits(const GroupElement& e) {
  return std::visit([](const auto& v) { return v.n_qubits(); }, e);
}

DiagonalElement sample_diagonal(int n, Rng& rng) {
  if (n < 1 || n > kMaxBitDim) throw std::invalid_argument("sample_diagonal: n out of range");
  DiagonalElement e{std::vector<int>(static_cast<std::size_t>(n)), BitMatrix(n, n)};
  for (auto& v : e.x) v = static_cast<int>(random_bits(rng, 2));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.b.set(i, j, random_bits(rng, 1) != 0);
  return e;
}

LinearPermElement sample_linear(int n, Rng& rng) { return {random_invertible(n, rng)}; }

CyclicElement sample_cyclic(int n, Rng& rng) {
  if (n < 1 || n > kMaxFieldDegree) throw std::invalid_argument("sample_cyclic: n out of range");
  const std::uint64_t period = (std::uint64_t{1} << n) - 1;
  return {n, uniform_below(rng, period), primitive_polynomial(n)};
}

NormalizerElement sample_normalizer(int n, Rng& rng) {
  if (n < 1 || 2 * n > kMaxBitDim) throw std::invalid_argument("sample_normalizer: n out of range");
  BitVector x(2 * n, random_bits(rng, 2 * n));
  return {x, random_symplectic(n, rng)};
}

ConditionalNormalizerElement sample_conditional_normalizer(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_conditional_normalizer: n must be >= 2");
  return {sample_normalizer(n - 1, rng), n - 1, 1};
}

GroupElement sample_element(GroupKind kind, int n, Rng& rng) {
  switch (kind) {
    case GroupKind::Diagonal:
      return sample_diagonal(n, rng);
    case GroupKind::Linear:
      return sample_linear(n, rng);
    case GroupKind::Cyclic:
      return sample_cyclic(n, rng);
    case GroupKind::Normalizer:
      return sample_normalizer(n, rng);
    case GroupKind::ConditionalNormalizer:
      return sample_conditional_normalizer(n, rng);
  }
  throw std::invalid_argument("unknown group kind");
}

Circuit element_to_circuit(const GroupElement& e) {
  struct Visitor {
    Circuit operator()(const DiagonalElement& d) const { return diagonal_circuit(d); }
    Circuit operator()(const LinearPermElement& l) const { return linear_circuit(l.l); }
    Circuit operator()(const CyclicElement& c) const { return linear_circuit(c.matrix()); }
    Circuit operator()(const NormalizerElement& n) const { return normalizer_circuit(n); }
    Circuit operator()(const ConditionalNormalizerElement& c) const { return conditional_circuit(c); }
  };
  return std::visit(Visitor{}, e);
}

Eigen::MatrixXcd pauli_matrix(const BitVector& b) {
  const int n = b.size() / 2;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    Eigen::Matrix2cd s;
    const bool x = b.get(q), z = b.get(n + q);
    if (!x && !z) s << 1, 0, 0, 1;
    else if (!x && z) s << 1, 0, 0, -1;
    else if (x && !z) s << 0, 1, 1, 0;
    else s << 0, cplx(0, -1), cplx(0, 1), 0;
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * s;
    out = std::move(next);
  }
  return out;
}

PauliAction conjugation_action(const Circuit& c) {
  for (const auto& g : c.gates())
    if (!g.is_clifford()) throw std::invalid_argument("conjugation_action: non-Clifford gate " + gate_kind_name(g.kind));
  const int n = c.n_qubits();
  if (n > 6) throw std::invalid_argument("conjugation_action: dense oracle limited to 6 qubits");
  const Eigen::MatrixXcd u = unitary(c);
  const double dim = static_cast<double>(u.rows());
  PauliAction a{BitVector(2 * n), BitMatrix(2 * n, 2 * n)};
  for (int j = 0; j < 2 * n; ++j) {
    const Eigen::MatrixXcd img = u * pauli_matrix(BitVector::unit(2 * n, j)) * u.adjoint();
    // A Pauli image has a single nonzero per column; column 0 fixes the X part.
    Eigen::Index r0 = 0;
    img.col(0).cwiseAbs().maxCoeff(&r0);
    const BitVector xbits = basis_bits(static_cast<std::uint64_t>(r0), n);
    bool found = false;
    for (std::uint64_t zc = 0; zc < (std::uint64_t{1} << n) && !found; ++zc) {
      BitVector label(2 * n);
      for (int q = 0; q < n; ++q) {
        label.set(q, xbits.get(q));
        label.set(n + q, (zc >> q) & 1U);
      }
      const Eigen::MatrixXcd p = pauli_matrix(label);
      const cplx overlap = (p.adjoint() * img).trace() / dim;
      if (std::abs(std::abs(overlap) - 1) > 1e-9) continue;
      if ((img - overlap * p).cwiseAbs().maxCoeff() > 1e-9) continue;
      if (std::abs(overlap.imag()) > 1e-9) throw std::logic_error("conjugation_action: image has an imaginary phase");
      a.x.set(j, overlap.real() < 0);
      a.l.set_column(j, label);
      found = true;
    }
    if (!found) throw std::logic_error("conjugation_action: image of a generator is not a Pauli operator");
  }
  return a;
}

bool verify_phase_independence(int n) {
  if (n < 1 || n > 3) throw std::invalid_argument("verify_phase_independence: n must be in [1, 3]");
  const std::uint64_t dim = std::uint64_t{1} << n;
  const auto elems = all_diagonal(n);
  std::vector<std::vector<int>> f(elems.size(), std::vector<int>(dim));
  for (std::size_t e = 0; e < elems.size(); ++e)
    for (std::uint64_t k = 0; k < dim; ++k) f[e][k] = elems[e].phase_exponent(k);
  for (std::uint64_t j = 0; j < dim; ++j)
    for (std::uint64_t k = 0; k < dim; ++k)
      for (std::uint64_t l = 0; l < dim; ++l)
        for (std::uint64_t m = 0; m < dim; ++m) {
          bool all_zero = true;
          for (const auto& fe : f) {
            if (((fe[j] - fe[k] + fe[l] - fe[m]) & 3) != 0) {
              all_zero = false;
              break;
            }
          }
          const bool allowed = (j == k && l == m) || (j == m && k == l);
          if (all_zero && !allowed) return false;
        }
  return true;
}

std::vector<Circuit> enumerate_group(GroupKind kind, int n) {
  std::vector<Circuit> out;
  switch (kind) {
    case GroupKind::Diagonal:
      if (n < 1 || n > 3) throw std::invalid_argument("enumerate_group: diagonal group too large");
      for (const auto& e : all_diagonal(n)) out.push_back(diagonal_circuit(e));
      break;
    case GroupKind::Linear:
      if (n < 1 || n > 4) throw std::invalid_argument("enumerate_group: linear group too large");
      for (const auto& l : enumerate_invertible(n)) out.push_back(linear_circuit(l));
      break;
    case GroupKind::Cyclic:
      if (n < 1 || n > 8) throw std::invalid_argument("enumerate_group: cyclic group too large");
      for (std::uint64_t k = 0; k + 1 < (std::uint64_t{1} << n); ++k)
        out.push_back(element_to_circuit(CyclicElement{n, k, primitive_polynomial(n)}));
      break;
    case GroupKind::Normalizer:
      if (n < 1 || n > 2) throw std::invalid_argument("enumerate_group: normalizer group too large");
      for (const auto& e : all_normalizer(n)) out.push_back(normalizer_circuit(e));
      break;
    case GroupKind::ConditionalNormalizer:
      if (n < 2 || n > 3) throw std::invalid_argument("enumerate_group: conditional normalizer needs 2 <= n <= 3");
      for (const auto& e : all_normalizer(n - 1)) out.push_back(conditional_circuit({e, n - 1, 1}));
      break;
  }
  return out;
}

DensityMatrix enumerate_expectation(std::span<const GroupKind> sequence, const DensityMatrix& rho) {
  DensityMatrix cur = rho;
  for (GroupKind kind : sequence) {
    const auto group = enumerate_group(kind, rho.n_qubits());
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
    for (const auto& c : group) acc += apply_circuit(cur, c).matrix();
    cur = DensityMatrix(rho.n_qubits(), acc / static_cast<double>(group.size()));
  }
  return cur;
}

DensityMatrix enumerate_expectation(GroupKind kind, const DensityMatrix& rho) {
  const GroupKind seq[1] = {kind};
  return enumerate_expectation(seq, rho);
}

nlohmann::json element_to_json(const GroupElement& e, std::optional<std::uint64_t> seed) {
  struct Visitor {
    nlohmann::json operator()(const DiagonalElement& d) const {
      return {{"kind", "diagonal"}, {"x", d.x}, {"B", matrix_json(d.b)}};
    }
    nlohmann::json operator()(const LinearPermElement& l) const { return {{"kind", "linear"}, {"L", matrix_json(l.l)}}; }
    nlohmann::json operator()(const CyclicElement& c) const {
      return {{"kind", "cyclic"}, {"n", c.n}, {"k", c.k}, {"modulus", c.modulus}};
    }
    nlohmann::json operator()(const NormalizerElement& m) const {
      std::vector<int> x;
      for (int i = 0; i < m.x.size(); ++i) x.push_back(m.x.get(i) ? 1 : 0);
      return {{"kind", "normalizer"}, {"x", x}, {"L", matrix_json(m.l)}};
    }
    nlohmann::json operator()(const ConditionalNormalizerElement& c) const {
      return {{"kind", "conditional_normalizer"},
              {"control", c.control},
              {"polarity", c.polarity},
              {"inner", (*this)(c.inner)}};
    }
  };
  nlohmann::json j = std::visit(Visitor{}, e);
  if (seed) j["seed"] = *seed;
  return j;
}

GroupElement element_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "diagonal") return DiagonalElement{j.at("x").get<std::vector<int>>(), matrix_from_json(j.at("B"))};
    if (kind == "linear") return LinearPermElement{matrix_from_json(j.at("L"))};
    if (kind == "cyclic") {
      return CyclicElement{j.at("n").get<int>(), j.at("k").get<std::uint64_t>(), j.at("modulus").get<std::uint32_t>()};
    }
    if (kind == "normalizer") {
      const auto bits = j.at("x").get<std::vector<int>>();
      BitVector x(static_cast<int>(bits.size()));
      for (std::size_t i = 0; i < bits.size(); ++i) x.set(static_cast<int>(i), bits[i] != 0);
      return NormalizerElement{x, matrix_from_json(j.at("L"))};
    }
    if (kind == "conditional_normalizer") {
      auto inner = std::get<NormalizerElement>(element_from_json(j.at("inner")));
      return ConditionalNormalizerElement{inner, j.at("control").get<int>(), j.at("polarity").get<int>()};
    }
    throw std::invalid_argument("unknown element kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("element record: ") + e.what());
  } catch (const std::bad_variant_access&) {
    throw std::invalid_argument("element record: inner element must be a normalizer");
  }
}

}  // namespace tempavg
