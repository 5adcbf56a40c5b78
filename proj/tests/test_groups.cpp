#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "tempavg/groups.hpp"

using namespace tempavg;

namespace {

using Mat = Eigen::MatrixXcd;

double dist(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Permutation matrix of |b> -> |Lb>, computed bit by bit.
Mat perm_oracle(const BitMatrix& l) {
  const int n = l.rows();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat u = Mat::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    std::vector<int> bits(n);
    for (int q = 0; q < n; ++q) bits[q] = (k >> (n - 1 - q)) & 1;
    Eigen::Index img = 0;
    for (int r = 0; r < n; ++r) {
      int v = 0;
      for (int c = 0; c < n; ++c) v ^= l.get(r, c) & bits[c];
      img = 2 * img + v;
    }
    u(img, k) = 1;
  }
  return u;
}

// Canonical form of a unitary up to global phase.
std::string phase_free_key(const Mat& u) {
  Eigen::Index r = 0, c = 0;
  u.cwiseAbs().maxCoeff(&r, &c);
  const cplx ph = u(r, c) / std::abs(u(r, c));
  const Mat v = u / ph;
  std::ostringstream os;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << std::lround(v(i).real() * 1e6) << ',' << std::lround(v(i).imag() * 1e6) << ';';
  return os.str();
}

Mat random_density(int n, Rng& rng, bool diagonal) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::normal_distribution<double> g;
  Mat a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = diagonal && i != j ? cplx(0, 0) : cplx(g(rng), diagonal ? 0 : g(rng));
  Mat m = a * a.adjoint();
  return m / m.trace().real();
}

}  // namespace

TEST_CASE("diagonal group elements") {
  Rng rng(1);
  const auto e1 = sample_diagonal(1, rng);
  CHECK(e1.x.size() == 1);
  CHECK(e1.b.rows() == 1);
  CHECK(e1.b.get(0, 0) == false);
  CHECK(enumerate_group(GroupKind::Diagonal, 1).size() == 4);

  DiagonalElement e{{0, 2}, BitMatrix(2, 2)};
  const Mat u = unitary(element_to_circuit(e));
  CHECK(std::abs(u(1, 1) - cplx(-1, 0)) < 1e-15);

  // Diagonal elements differ by phases, so compare raw diagonals.
  std::set<std::string> raw;
  for (const auto& c : enumerate_group(GroupKind::Diagonal, 2)) {
    std::ostringstream os;
    const Mat v = unitary(c);
    for (Eigen::Index i = 0; i < 4; ++i) os << std::lround(v(i, i).real()) << std::lround(v(i, i).imag()) << ';';
    raw.insert(os.str());
  }
  CHECK(raw.size() == 32);

  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    const auto d = sample_diagonal(n, rng);
    const Circuit c = element_to_circuit(d);
    CHECK(c.size() <= static_cast<std::size_t>(n * (n - 1) / 2 + n));
    const Mat v = unitary(c);
    for (Eigen::Index k = 0; k < v.rows(); ++k) {
      int ex = 0;
      for (int j = 0; j < n; ++j) ex += d.x[j] * ((k >> (n - 1 - j)) & 1);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) ex += 2 * d.b.get(i, j) * ((k >> (n - 1 - i)) & 1) * ((k >> (n - 1 - j)) & 1);
      const cplx expected = std::pow(cplx(0, 1), ex);
      CHECK(std::abs(v(k, k) - expected) < 1e-12);
    }
    CHECK((v - Mat(v.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("phase independence") {
  CHECK(verify_phase_independence(1));
  CHECK(verify_phase_independence(2));
  CHECK(verify_phase_independence(3));
  CHECK_THROWS_AS(verify_phase_independence(4), std::invalid_argument);
}

TEST_CASE("linear and cyclic elements") {
  CHECK(element_to_circuit(LinearPermElement{BitMatrix::identity(3)}).empty());
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto e = sample_linear(1 + trial % 3, rng);
    CHECK(dist(unitary(element_to_circuit(e)), perm_oracle(e.l)) < 1e-15);
  }
  // n = 2, k = 1: multiplication by x cycles 1 -> 2 -> 3 -> 1.
  const Circuit c1 = element_to_circuit(CyclicElement{2, 1, primitive_polynomial(2)});
  CHECK(c1.size() == 2);
  const Mat u1 = unitary(c1);
  CHECK(std::abs(u1(2, 1) - 1.0) < 1e-15);
  CHECK(std::abs(u1(3, 2) - 1.0) < 1e-15);
  CHECK(std::abs(u1(1, 3) - 1.0) < 1e-15);
  CHECK(std::abs(u1(0, 0) - 1.0) < 1e-15);
  // k = 2 is the permutation 1 -> 3 -> 2 -> 1 written out in the two-qubit example.
  Mat p1 = Mat::Zero(4, 4);
  p1(0, 0) = p1(1, 2) = p1(2, 3) = p1(3, 1) = 1;
  CHECK(dist(unitary(element_to_circuit(CyclicElement{2, 2, primitive_polynomial(2)})), p1) < 1e-15);

  for (int n = 2; n <= 3; ++n) {
    const std::uint64_t period = (1U << n) - 1;
    std::set<std::string> seen;
    for (std::uint64_t k = 0; k < period; ++k) seen.insert(phase_free_key(unitary(element_to_circuit(CyclicElement{n, k, primitive_polynomial(n)}))));
    CHECK(seen.size() == period);
    for (std::uint64_t a = 0; a < period; ++a)
      for (std::uint64_t b = 0; b < period; ++b) {
        const Mat ua = unitary(element_to_circuit(CyclicElement{n, a, primitive_polynomial(n)}));
        const Mat ub = unitary(element_to_circuit(CyclicElement{n, b, primitive_polynomial(n)}));
        const Mat uab = unitary(element_to_circuit(CyclicElement{n, (a + b) % period, primitive_polynomial(n)}));
        CHECK(dist(ua * ub, uab) < 1e-15);
      }
  }
}

TEST_CASE("linear group is two-transitive on nonzero states") {
  for (int n = 2; n <= 3; ++n) {
    const std::uint64_t dim = 1U << n;
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> hit;
    for (const auto& l : enumerate_invertible(n)) {
      for (std::uint64_t i = 1; i < dim; ++i)
        for (std::uint64_t j = 1; j < dim; ++j) {
          if (i == j) continue;
          const auto li = basis_index(l * basis_bits(i, n)), lj = basis_index(l * basis_bits(j, n));
          hit.insert({{static_cast<int>(i), static_cast<int>(j)}, {static_cast<int>(li), static_cast<int>(lj)}});
        }
    }
    const std::size_t pairs = (dim - 1) * (dim - 2);
    CHECK(hit.size() == pairs * pairs);
  }
}

TEST_CASE("conjugation action oracle") {
  auto empty = conjugation_action(Circuit(2));
  CHECK(empty.x.is_zero());
  CHECK(empty.l.is_identity());

  Circuit cn(2);
  cn.add(Gate::cnot(0, 1));
  const auto a = conjugation_action(cn);
  // Columns: X0, X1, Z0, Z1; rows: x0, x1, z0, z1.
  CHECK(a.l.column(0) == BitVector::from_string("1100"));
  CHECK(a.l.column(1) == BitVector::from_string("0100"));
  CHECK(a.l.column(2) == BitVector::from_string("0010"));
  CHECK(a.l.column(3) == BitVector::from_string("0011"));
  CHECK(a.x.is_zero());

  Circuit s(1);
  s.add(Gate::s(0));
  const auto as = conjugation_action(s);
  CHECK(as.l.column(0) == BitVector::from_string("11"));
  CHECK_FALSE(as.x.get(0));

  Circuit ry(1);
  ry.add(Gate::ry90(0));
  const auto ar = conjugation_action(ry);
  CHECK(ar.l.column(0) == BitVector::from_string("01"));
  CHECK(ar.x.get(0));  // X -> -Z
  CHECK_FALSE(ar.x.get(1));

  Circuit bad(3);
  bad.add(Gate::toffoli({0, 1}, {1, 1}, 2));
  CHECK_THROWS_AS(conjugation_action(bad), std::invalid_argument);
  Circuit t(1);
  t.add(Gate::perm_phase({0}, {0, 1}, {0, 1}));  // S written as a table is fine
  CHECK_NOTHROW(conjugation_action(t));
}

TEST_CASE("normalizer synthesis reproduces sampled actions") {
  Rng rng(3);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto e = sample_normalizer(n, rng);
      REQUIRE(is_symplectic(e.l));
      const Circuit c = element_to_circuit(e);
      const auto got = conjugation_action(c);
      CHECK(got.l == e.l);
      CHECK(got.x == e.x);
      CHECK(c.size() <= static_cast<std::size_t>(6 * n * n + 6 * n));
    }
  }
}

TEST_CASE("single-qubit normalizer has 24 distinct actions") {
  const auto all = enumerate_group(GroupKind::Normalizer, 1);
  CHECK(all.size() == 24);
  std::set<std::string> actions, unitaries;
  for (const auto& c : all) {
    const auto a = conjugation_action(c);
    actions.insert(a.x.to_string() + "|" + a.l.to_string());
    unitaries.insert(phase_free_key(unitary(c)));
  }
  CHECK(actions.size() == 24);
  CHECK(unitaries.size() == 24);
}

TEST_CASE("normalizer twirl of Paulis") {
  Rng rng(4);
  const int n = 2;
  const int trials = 10000;
  BitVector label = BitVector::from_string("1001");  // X0 Z1
  const Mat sigma = pauli_matrix(label);
  Mat mean = Mat::Zero(4, 4);
  Mat second = Mat::Zero(16, 16);
  auto kron = [](const Mat& a, const Mat& b) {
    Mat m(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return m;
  };
  for (int t = 0; t < trials; ++t) {
    const Mat u = unitary(element_to_circuit(sample_normalizer(n, rng)));
    const Mat img = u * sigma * u.adjoint();
    mean += img;
    second += kron(img, img);
  }
  mean /= trials;
  second /= trials;
  CHECK(mean.cwiseAbs().maxCoeff() <= 5.0 / std::sqrt(trials));
  Mat expected = Mat::Zero(16, 16);
  for (std::uint64_t b = 1; b < 16; ++b) {
    const Mat p = pauli_matrix(BitVector(4, b));
    expected += kron(p, p);
  }
  expected /= 15.0;
  CHECK((second - expected).cwiseAbs().maxCoeff() <= 5.0 / std::sqrt(trials));
}

TEST_CASE("conditional normalizer block structure") {
  NormalizerElement id{BitVector(2), BitMatrix::identity(2)};
  const Mat ui = unitary(element_to_circuit(ConditionalNormalizerElement{id, 1, 1}));
  CHECK(dist(ui, Mat::Identity(4, 4)) < 1e-15);

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = sample_conditional_normalizer(3, rng);
    CHECK(e.control == 2);
    const Mat u = unitary(element_to_circuit(e));
    const Mat inner = unitary(element_to_circuit(e.inner));
    for (Eigen::Index i = 0; i < 8; ++i)
      for (Eigen::Index j = 0; j < 8; ++j) {
        const cplx expected = (i % 2 == 0 && j % 2 == 0) ? cplx(i == j ? 1 : 0, 0)
                              : (i % 2 == 1 && j % 2 == 1) ? inner(i / 2, j / 2)
                                                            : cplx(0, 0);
        CHECK(std::abs(u(i, j) - expected) < 1e-12);
      }
  }
  CHECK_THROWS_AS(sample_conditional_normalizer(1, rng), std::invalid_argument);
}

TEST_CASE("enumerated expectations") {
  Rng rng(6);
  for (int n = 1; n <= 2; ++n) {
    const DensityMatrix rho(n, random_density(n, rng, false));
    const auto avg = enumerate_expectation(GroupKind::Diagonal, rho);
    CHECK(dist(avg.matrix(), Mat(rho.matrix().diagonal().asDiagonal())) < 1e-15);
  }
  const DensityMatrix diag(2, random_density(2, rng, true));
  const GroupKind dt[2] = {GroupKind::Diagonal, GroupKind::Linear};
  CHECK(dist(enumerate_expectation(dt, diag).matrix(), effective_pure_target(diag).matrix()) < 1e-15);
  CHECK(dist(enumerate_expectation(GroupKind::Linear, diag).matrix(), effective_pure_target(diag).matrix()) < 1e-15);

  for (auto kind : {GroupKind::Diagonal, GroupKind::Linear, GroupKind::Cyclic, GroupKind::Normalizer,
                    GroupKind::ConditionalNormalizer}) {
    const auto mixed = DensityMatrix::maximally_mixed(2);
    CHECK(dist(enumerate_expectation(kind, mixed).matrix(), mixed.matrix()) < 1e-15);
  }

  // Every prefix of D, T, (N1, T) leaves the effective pure target in place.
  const DensityMatrix general(2, random_density(2, rng, false));
  const auto target = effective_pure_target(DensityMatrix(2, Mat(general.matrix().diagonal().asDiagonal())));
  const GroupKind pipeline[4] = {GroupKind::Diagonal, GroupKind::Linear, GroupKind::ConditionalNormalizer, GroupKind::Linear};
  for (std::size_t len = 2; len <= 4; ++len)
    CHECK(dist(enumerate_expectation(std::span<const GroupKind>(pipeline, len), general).matrix(), target.matrix()) < 1e-14);
}

TEST_CASE("element json round trip") {
  Rng rng(7);
  for (auto kind : {GroupKind::Diagonal, GroupKind::Linear, GroupKind::Cyclic, GroupKind::Normalizer,
                    GroupKind::ConditionalNormalizer}) {
    const auto e = sample_element(kind, 3, rng);
    const auto j = element_to_json(e, 42);
    CHECK(j.at("seed") == 42);
    const auto back = element_from_json(j);
    CHECK(element_to_json(back, 42) == j);
    CHECK(dist(unitary(element_to_circuit(back)), unitary(element_to_circuit(e))) < 1e-15);
  }
  CHECK_THROWS_AS(element_from_json(nlohmann::json{{"kind", "nope"}}), std::invalid_argument);
}
