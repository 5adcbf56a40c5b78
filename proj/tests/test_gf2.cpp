#include "doctest.h"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "tempavg/gf2.hpp"

using namespace tempavg;

namespace {

// Carry-less product followed by long division; independent of gf2n_mul.
std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, std::uint32_t modulus) {
  std::uint64_t prod = 0;
  for (int i = 0; i < 32; ++i)
    if ((b >> i) & 1U) prod ^= std::uint64_t{a} << i;
  int deg = 0;
  while ((modulus >> (deg + 1)) != 0) ++deg;
  for (int i = 63; i >= deg; --i)
    if ((prod >> i) & 1U) prod ^= std::uint64_t{modulus} << (i - deg);
  return static_cast<std::uint32_t>(prod);
}

std::string key(const BitMatrix& m) { return m.to_string(); }

}  // namespace

TEST_CASE("GF(4) multiplication table") {
  GF2nField f(2);
  CHECK(f.modulus() == 0x7);
  auto x = f.element(0b10);
  CHECK(gf2n_mul(x, x).bits == 0b11);
  CHECK(gf2n_mul(x, f.element(0b11)).bits == 0b01);
  for (std::uint32_t a = 0; a < 4; ++a) {
    CHECK(gf2n_mul(f.element(a), f.one()).bits == a);
    for (std::uint32_t b = 0; b < 4; ++b)
      CHECK(gf2n_mul(f.element(a), f.element(b)).bits == slow_mul(a, b, 0x7));
  }
}

TEST_CASE("modulus mismatch is rejected") {
  GF2nElement a{1, 0x7};
  GF2nElement b{1, 0xb};
  CHECK_THROWS_AS(gf2n_mul(a, b), std::invalid_argument);
}

TEST_CASE("field axioms hold exhaustively for n <= 4") {
  for (int n = 1; n <= 4; ++n) {
    GF2nField f(n);
    const std::uint32_t q = f.order();
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b) {
        const auto ea = f.element(a), eb = f.element(b);
        REQUIRE(gf2n_mul(ea, eb) == gf2n_mul(eb, ea));
        REQUIRE(gf2n_mul(ea, eb).bits == slow_mul(a, b, f.modulus()));
        for (std::uint32_t c = 0; c < q; ++c) {
          const auto ec = f.element(c);
          REQUIRE(gf2n_mul(gf2n_mul(ea, eb), ec) == gf2n_mul(ea, gf2n_mul(eb, ec)));
          REQUIRE(gf2n_mul(ea, f.element(b ^ c)).bits == (gf2n_mul(ea, eb).bits ^ gf2n_mul(ea, ec).bits));
        }
      }
  }
}

TEST_CASE("generator orders") {
  CHECK(gf2n_generator(1).bits == 1);
  CHECK(gf2n_generator(2).bits == 0b10);
  for (int n = 1; n <= 12; ++n) {
    GF2nField f(n);
    const auto g = f.generator();
    // Count powers by hand rather than via multiplicative_order.
    std::uint64_t k = 1;
    auto v = g;
    while (v.bits != 1) {
      v = gf2n_mul(v, g);
      ++k;
    }
    CHECK(k == f.order() - 1);
    CHECK(f.multiplicative_order(g) == k);
  }
  CHECK_THROWS_AS(gf2n_generator(0), std::invalid_argument);
  CHECK_THROWS_AS(gf2n_generator(13), std::invalid_argument);
}

TEST_CASE("primitive polynomial table is lexicographically smallest and matches data file") {
  auto table = primitive_polynomial_table();
  REQUIRE(table.size() == 16);
  for (int n = 1; n <= 16; ++n) {
    const std::uint32_t m = table[n - 1];
    CHECK(is_primitive_polynomial(m, n));
    if (n <= 12) {
      for (std::uint32_t c = 1U << n; c < m; ++c) CHECK_FALSE(is_primitive_polynomial(c, n));
    }
  }
  std::ifstream in(std::string(TEMPAVG_DATA_DIR) + "/primitive_polynomials.txt");
  REQUIRE(in.good());
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    REQUIRE(i < table.size());
    CHECK(std::stoul(line, nullptr, 16) == table[i]);
    ++i;
  }
  CHECK(i == table.size());
  CHECK_THROWS_AS(GF2nField(3, 0xf), std::invalid_argument);  // x^3+x^2+x+1 is reducible
}

TEST_CASE("multiplication matrix") {
  GF2nField f(2);
  const auto lx = multiplication_matrix(f.element(0b10));
  CHECK(lx * BitVector(2, 0b01) == BitVector(2, 0b10));
  CHECK(lx * BitVector(2, 0b10) == BitVector(2, 0b11));
  CHECK(lx * BitVector(2, 0b11) == BitVector(2, 0b01));
  CHECK(multiplication_matrix(f.one()).is_identity());
  CHECK_THROWS_AS(multiplication_matrix(f.element(0)), std::invalid_argument);

  GF2nField f3(3);
  const auto lg = multiplication_matrix(f3.generator());
  std::set<std::string> powers;
  BitMatrix p = BitMatrix::identity(3);
  for (int k = 0; k < 20; ++k) {
    powers.insert(key(p));
    p = p * lg;
  }
  CHECK(powers.size() == 7);

  for (int n = 1; n <= 3; ++n) {
    GF2nField fn(n);
    for (std::uint32_t a = 1; a < fn.order(); ++a)
      for (std::uint32_t b = 1; b < fn.order(); ++b) {
        const auto ea = fn.element(a), eb = fn.element(b);
        CHECK(multiplication_matrix(ea) * multiplication_matrix(eb) == multiplication_matrix(gf2n_mul(ea, eb)));
      }
  }
}

TEST_CASE("qubit ordering of basis indices") {
  CHECK(basis_bits(0b100, 3).get(0));
  CHECK_FALSE(basis_bits(0b100, 3).get(2));
  for (std::uint64_t k = 0; k < 16; ++k) CHECK(basis_index(basis_bits(k, 4)) == k);
  // In qubit order the matrix acts on basis indices exactly as the field does.
  GF2nField f(3);
  const auto lq = to_qubit_order(multiplication_matrix(f.generator()));
  for (std::uint32_t b = 0; b < 8; ++b) {
    const auto img = basis_index(lq * basis_bits(b, 3));
    CHECK(img == gf2n_mul(f.generator(), f.element(b)).bits);
  }
}

TEST_CASE("bit matrix basics") {
  auto m = BitMatrix::from_rows({{1, 1, 0}, {0, 1, 1}, {1, 0, 0}});
  CHECK(m.rank() == 3);
  CHECK((m * m.inverse()).is_identity());
  auto s = BitMatrix::from_rows({{1, 1}, {1, 1}});
  CHECK(s.rank() == 1);
  CHECK_THROWS_AS(s.inverse(), std::invalid_argument);
  CHECK(m.transpose().transpose() == m);
  CHECK(BitVector::from_string("0110").weight() == 2);
  CHECK(BitVector::from_string("0110").to_string() == "0110");
}

TEST_CASE("solve_affine") {
  auto a = BitMatrix::from_rows({{1, 1, 0}, {0, 1, 1}});
  auto sol = solve_affine(a, BitVector::from_string("10"));
  REQUIRE(sol.particular);
  CHECK(a * *sol.particular == BitVector::from_string("10"));
  CHECK(sol.basis.size() == 1);
  for (const auto& b : sol.basis) CHECK((a * b).is_zero());
  auto inconsistent = solve_affine(BitMatrix::from_rows({{1, 1}, {1, 1}}), BitVector::from_string("10"));
  CHECK_FALSE(inconsistent.particular);
}

TEST_CASE("gaussian_decompose") {
  CHECK(gaussian_decompose(BitMatrix::identity(4)).empty());
  auto l = BitMatrix::from_rows({{1, 0}, {1, 1}});
  auto ops = gaussian_decompose(l);
  CHECK(ops.size() == 1);
  CHECK(compose_row_ops(2, ops) == l);
  CHECK_THROWS_AS(gaussian_decompose(BitMatrix::from_rows({{1, 1}, {1, 1}})), std::invalid_argument);

  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 8;
    auto r = random_invertible(n, rng);
    REQUIRE(compose_row_ops(n, gaussian_decompose(r)) == r);
  }
  for (int seed = 0; seed < 100; ++seed) {
    Rng r4(seed);
    auto r = random_invertible(4, r4);
    CHECK(compose_row_ops(4, gaussian_decompose(r)) == r);
  }
}

TEST_CASE("random_invertible is uniform on GL(2,2)") {
  Rng rng(11);
  CHECK(random_invertible(1, rng).is_identity());
  std::map<std::string, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    auto m = random_invertible(2, rng);
    REQUIRE(m.is_invertible());
    ++counts[key(m)];
  }
  CHECK(counts.size() == enumerate_invertible(2).size());
  CHECK(counts.size() == 6);
  const double p = 1.0 / 6.0;
  const double sd = std::sqrt(draws * p * (1 - p));
  for (const auto& [k, c] : counts) CHECK(std::abs(c - draws * p) < 3 * sd);
}

TEST_CASE("symplectic sampling and counting") {
  CHECK(is_symplectic(BitMatrix::identity(2)));
  CHECK(symplectic_count(1) == 6);
  CHECK(symplectic_count(2) == 720);
  CHECK(symplectic_count(3) == 1451520);
  CHECK(symplectic_count(3) == boost::multiprecision::cpp_int(63 * 30 * 12 * 8 * 4 * 2));
  CHECK(enumerate_symplectic(1).size() == 6);

  // Oracle independent of enumerate_symplectic: filter all invertible 4x4.
  const auto m2 = symplectic_form(2);
  std::size_t brute = 0;
  for (const auto& l : enumerate_invertible(4))
    if (l.transpose() * m2 * l == m2) ++brute;
  CHECK(brute == 720);
  CHECK(enumerate_symplectic(2).size() == brute);

  Rng rng(3);
  std::map<std::string, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    auto l = random_symplectic(1, rng);
    REQUIRE(is_symplectic(l));
    ++counts[key(l)];
  }
  REQUIRE(counts.size() == 6);
  double chi2 = 0;
  for (const auto& [k, c] : counts) chi2 += std::pow(c - draws / 6.0, 2) / (draws / 6.0);
  CHECK(chi2 < 15.09);  // chi-square, 5 dof, p = 0.01

  std::set<std::string> seen;
  for (int i = 0; i < 30000; ++i) {
    auto l = random_symplectic(2, rng);
    REQUIRE(is_symplectic(l));
    seen.insert(key(l));
  }
  CHECK(seen.size() == 720);

  for (int n = 1; n <= 16; ++n) {
    auto l = random_symplectic(n, rng);
    CHECK(is_symplectic(l));
    CHECK(l.is_invertible());
  }
}
