#include "doctest.h"

#include <cmath>
#include <sstream>

#include "tempavg/analytics.hpp"

using namespace tempavg;

namespace {

using Mat = Eigen::MatrixXcd;

DensityMatrix random_diagonal(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(std::size_t{1} << n);
  double s = 0;
  for (auto& v : p) s += (v = u(rng));
  for (auto& v : p) v /= s;
  return DensityMatrix::diagonal(p);
}

// Random full-rank state with off-diagonal entries.
DensityMatrix random_state(int n, Rng& rng) {
  std::normal_distribution<double> g;
  const Eigen::Index d = Eigen::Index{1} << n;
  Mat a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {g(rng), g(rng)};
  Mat m = a * a.adjoint();
  m /= m.trace();
  return {n, m};
}

Mat random_clifford_observable(int n, Rng& rng) {
  return Observable::conjugated(element_to_circuit(sample_normalizer(n, rng))).matrix;
}

double tr2(const Mat& a) { return (a * a).trace().real(); }

}  // namespace

TEST_CASE("snr bounds") {
  CHECK(snr_bound(SnrMethod::Exhaustive, {2, 1e3, 1}) == doctest::Approx(0.5 * std::sqrt(3.0) * 1000).epsilon(1e-14));
  CHECK(snr_bound(SnrMethod::LabeledFlipSwap, {3, 1e3, 1}) ==
        doctest::Approx(std::sqrt(2.0) * 4 * 1000 / 8).epsilon(1e-14));
  CHECK(std::abs(snr_bound(SnrMethod::Exhaustive, {2, 1e3, 1}) - 866.03) < 0.01);
  CHECK(std::abs(snr_bound(SnrMethod::LabeledFlipSwap, {3, 1e3, 1}) - 707.11) < 0.01);
  for (SnrMethod m : all_snr_methods()) {
    CHECK(snr_bound(m, {4, 1e3, 0}) == 0);
    CHECK(snr_method_from_name(snr_method_name(m)) == m);
  }
  // n = 3, snr1 = 10: hand-evaluated values.
  CHECK(snr_bound(SnrMethod::TwoTransitive, {3, 10, 1}) == doctest::Approx(3.0 / 8 * 10 / std::sqrt(1 + 300.0 / 6)));
  CHECK(snr_bound(SnrMethod::ConditionalNormalizer, {3, 10, 1}) ==
        doctest::Approx(3.0 / 8 * 10 / std::sqrt(1 + 600.0 / 56)));
  CHECK(snr_bound(SnrMethod::RandomizedFlipSwap, {3, 10, -1}) ==
        doctest::Approx(3.0 / 8 * 10 / std::sqrt(0.5 + 900.0 / 48)));
  CHECK(snr_bound(SnrMethod::FullyRandomizedFlipSwap, {3, 10, 1}) ==
        doctest::Approx(3.0 / 8 * 10 / std::sqrt(0.5 + 1800.0 / 448)));
  for (int n = 2; n <= 10; ++n)
    CHECK(snr_bound(SnrMethod::LabeledFlipSwap, {n, 1e3, 1}) >= snr_bound(SnrMethod::RandomizedFlipSwap, {n, 1e3, 1}));
  CHECK_THROWS(snr_method_from_name("bogus"));
  CHECK_THROWS(snr_bound(SnrMethod::Exhaustive, {1, 1, 1}));
  CHECK(experiments_per_signal(SnrMethod::Exhaustive, 3) == 7);
  CHECK(experiments_per_signal(SnrMethod::TwoTransitive, 3) == 1);
}

TEST_CASE("snr curve csv") {
  std::ostringstream os;
  const auto methods = all_snr_methods();
  write_snr_curves(os, methods, 2, 10, 1e3, 1);
  std::istringstream is(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#' && line.rfind("method", 0) != 0) ++rows;
  CHECK(rows == 9 * static_cast<int>(methods.size()));
}

TEST_CASE("two-transitive variance matches enumeration") {
  Rng rng(5);
  const GroupKind seq[] = {GroupKind::Diagonal, GroupKind::Linear};
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = t % 2 ? random_diagonal(2, rng) : random_state(2, rng);
    for (const Mat& sigma : {Observable::sigma_z1(2).matrix, random_clifford_observable(2, rng)}) {
      const double ex = variance_exact_two_transitive(rho, sigma);
      CHECK(std::abs(ex - variance_enumerated(seq, rho, sigma)) < 1e-12);
      CHECK(ex <= variance_bound_two_transitive(rho) + 1e-15);
    }
  }
  const DensityMatrix pure = effective_pure_target(random_diagonal(3, rng));
  CHECK(std::abs(variance_exact_two_transitive(pure, random_clifford_observable(3, rng))) < 1e-15);
}

TEST_CASE("two-transitive bound at n=3") {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const DensityMatrix rho = random_diagonal(3, rng);
    CHECK(variance_exact_two_transitive(rho, random_clifford_observable(3, rng)) <=
          variance_bound_two_transitive(rho) + 1e-15);
  }
}

TEST_CASE("cyclic variance matches enumeration") {
  Rng rng(7);
  const GroupKind seq[] = {GroupKind::Diagonal, GroupKind::Cyclic};
  const GF2nField field(2);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = t % 2 ? random_diagonal(2, rng) : random_state(2, rng);
    for (const Mat& sigma : {Observable::sigma_z1(2).matrix, random_clifford_observable(2, rng)})
      CHECK(std::abs(variance_exact_cyclic(rho, sigma, field) - variance_enumerated(seq, rho, sigma)) < 1e-12);
  }
  // Diagonal rho and sigma at n = 2: the 3-cycle sums are symmetric, so the
  // two evaluators coincide.
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho = random_diagonal(2, rng);
    const Mat z = Observable::sigma_z1(2).matrix;
    CHECK(std::abs(variance_exact_cyclic(rho, z, field) - variance_exact_two_transitive(rho, z)) < 1e-15);
  }
  const DensityMatrix pure = effective_pure_target(random_diagonal(3, rng));
  CHECK(std::abs(variance_exact_cyclic(pure, Observable::sigma_z1(3).matrix, GF2nField(3))) < 1e-15);
}

TEST_CASE("unitary and conditional bounds") {
  const DensityMatrix rho = DensityMatrix::diagonal({0.4, 0.3, 0.2, 0.1});
  CHECK(variance_bound_unitary(rho) == doctest::Approx(0.01).epsilon(1e-12));
  const DensityMatrix pure = effective_pure_target(rho);
  CHECK(variance_bound_unitary(pure) < 1e-30);
  CHECK(variance_bound_conditional(pure, 3) < 1e-30);

  Rng rng(8);
  const DensityMatrix r3 = random_diagonal(3, rng);
  const double lambda = std::exp(0.1) / 2;
  const double u = variance_bound_unitary(r3);
  for (int k = 0; k < 5; ++k)
    CHECK((variance_bound_conditional(r3, k + 1) - u) / (variance_bound_conditional(r3, k) - u) ==
          doctest::Approx(lambda));
  CHECK(variance_bound_fully_randomized(3, 1e-3) == doctest::Approx(2.0 * 9 * 1e-6 / (64 * 7)));
}

TEST_CASE("four-tensor realization") {
  const int n = 2;
  const FourTensorBasis b(n, n - 1);
  const auto ng = enumerate_group(GroupKind::ConditionalNormalizer, n);
  const auto tg = enumerate_group(GroupKind::Linear, n);
  const double big_n = 4;

  // The conditional normalizer spreads D_1 evenly over J_11 and E_11 and
  // leaves the other pieces alone.
  const Mat d1 = FourTensorBasis::twirl(b.d_sector(1), ng);
  CHECK((d1 - 2 / (big_n + 2) * (b.j_sector(1, 1) + b.e_sector(1, 1))).cwiseAbs().maxCoeff() < 1e-12);
  for (const Mat& m : {b.d_sector(0), b.tensor(FourTensorBasis::Tensor::E), b.tensor(FourTensorBasis::Tensor::J),
                       b.tensor(FourTensorBasis::Tensor::Z1), b.tensor(FourTensorBasis::Tensor::Z2)})
    CHECK((FourTensorBasis::twirl(m, ng) - m).cwiseAbs().maxCoeff() < 1e-12);
  // The linear group sends D_0 to a multiple of D.
  CHECK((FourTensorBasis::twirl(b.d_sector(0), tg) -
         (big_n - 2) / (2 * (big_n - 1)) * b.tensor(FourTensorBasis::Tensor::D))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // Coefficient recursion against dense averaging.
  Rng rng(9);
  for (int t = 0; t < 3; ++t) {
    const DensityMatrix rho = t == 0 ? random_diagonal(n, rng) : random_state(n, rng);
    const Mat check = deviation_parts(rho).check;
    Mat r = FourTensorBasis::twirl(
        FourTensorBasis::twirl(FourTensorBasis::square(check), enumerate_group(GroupKind::Diagonal, n)), tg);
    const FourTensorCoefficients c0 = initial_coefficients(rho);
    for (int k = 0; k <= 3; ++k) {
      double residual = 1;
      const FourTensorCoefficients got = b.extract(r, &residual);
      const FourTensorCoefficients want = recursion_coefficients(c0, n, k);
      CHECK(residual < 1e-12);
      CHECK(std::abs(got.alpha - want.alpha) < 1e-12);
      CHECK(std::abs(got.beta - want.beta) < 1e-12);
      CHECK(std::abs(got.gamma - want.gamma) < 1e-12);
      CHECK(std::abs(got.delta - want.delta) < 1e-12);
      const Mat sigma = random_clifford_observable(n, rng);
      const double direct = (r * FourTensorBasis::square(sigma)).trace().real();
      CHECK(std::abs(direct - variance_from_coefficients(want, sigma)) < 1e-12);
      r = FourTensorBasis::twirl(FourTensorBasis::twirl(r, ng), tg);
    }
  }
}

TEST_CASE("recursion coefficients") {
  const FourTensorCoefficients c0{0.3, 0.1, -0.05, 0.02};
  const auto same = recursion_coefficients(c0, 3, 0);
  CHECK(same.alpha == c0.alpha);
  CHECK(same.beta == c0.beta);
  double prev_b = c0.beta, prev_g = c0.gamma;
  for (int k = 1; k < 20; ++k) {
    const auto c = recursion_coefficients(c0, 3, k);
    CHECK(c.beta >= prev_b);
    CHECK(c.gamma >= prev_g);
    prev_b = c.beta;
    prev_g = c.gamma;
  }
  const auto inf = recursion_coefficients(c0, 3, 2000);
  CHECK(inf.beta == doctest::Approx(c0.beta + c0.alpha / 8).epsilon(1e-12));
  CHECK(inf.gamma == doctest::Approx(c0.gamma + c0.alpha / 8).epsilon(1e-12));
  CHECK(std::abs(inf.alpha) < 1e-12);
}

TEST_CASE("deviation identities") {
  Rng rng(10);
  for (int n = 2; n <= 3; ++n) {
    const DensityMatrix rho = random_state(n, rng);
    const DeviationParts p = deviation_parts(rho);
    const double lhs = tr2(rho.matrix());
    const double rhs = tr2(p.check_not0) + tr2(p.check_0) + std::norm(rho(0, 0)) + (rho.dim() - 1) * p.p_bar * p.p_bar;
    CHECK(std::abs(lhs - rhs) < 1e-14);

    std::uniform_real_distribution<double> u(-0.05, 0.05);
    std::vector<double> d(static_cast<std::size_t>(n));
    double s2 = 0, prod = 1;
    for (auto& v : d) {
      v = u(rng);
      s2 += v * v;
      prod *= 1 + v * v;
    }
    const double t = tr2(deviation_parts(thermal_state({d, ThermalMode::ExactProduct})).check);
    const double scale = std::ldexp(1.0, -n);
    CHECK(t <= scale * (prod - 1) * (1 + 1e-12));
    CHECK(scale * (prod - 1) <= scale * std::expm1(s2) * (1 + 1e-12));
  }
  // sum(delta^2)/2^n is the leading-order size of the upper bound, not a
  // lower bound: equal polarizations at n = 2 give (a^2 + b^2 - ab)/6.
  {
    const double a = 1e-3;
    const double t = tr2(deviation_parts(thermal_state({{a, a}, ThermalMode::FirstOrder})).check);
    CHECK(t == doctest::Approx(a * a / 6).epsilon(1e-9));
    CHECK(t < 2 * a * a / 4);
  }
}

TEST_CASE("empirical variance") {
  Rng rng(12);
  const DensityMatrix rho = random_diagonal(2, rng);
  const Mat z = Observable::sigma_z1(2).matrix;
  const VarianceEstimate e = empirical_variance({Protocol::GroupRandomization, 2, 0}, rho, Circuit(2), 20000, 3, 4);
  const double ex = variance_exact_two_transitive(rho, z);
  CHECK(std::abs(e.variance - ex) < 4 * e.stderr_variance);
  CHECK(std::abs(e.mean - expectation_sigma_z1(effective_pure_target(rho))) < 4 * e.stderr_mean);

  const VarianceEstimate same = empirical_variance({Protocol::GroupRandomization, 2, 0}, rho, Circuit(2), 20000, 3, 1);
  CHECK(same.variance == e.variance);

  // Exact conditional-normalizer variance after one round.
  const DensityMatrix r3 = random_diagonal(3, rng);
  const Mat z3 = Observable::sigma_z1(3).matrix;
  const VarianceEstimate c = empirical_variance({Protocol::GroupRandomization, 3, 1}, r3, Circuit(3), 20000, 4, 4);
  CHECK(std::abs(c.variance - variance_exact_conditional(r3, z3, 1)) < 4 * c.stderr_variance);
  CHECK(within_bound(c, variance_bound_conditional(r3, 1)));

  const std::vector<double> flat(10, 0.25);
  CHECK(sample_moments(flat).variance == 0);
  CHECK_THROWS(empirical_variance({Protocol::GroupRandomization, 2, 0}, rho, Circuit(2), 1, 0));
}

TEST_CASE("sign decision") {
  CHECK(block_size(0.5) == 16);
  CHECK(block_size(2) == 1);
  CHECK(block_size(5) == 1);
  Rng rng(13);
  std::normal_distribution<double> g(0.5, 1.0);
  int wrong = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> s(11 * 16);
    for (auto& v : s) v = g(rng);
    const SignDecision d = sign_decision(s, 0.5, 11);
    CHECK(d.samples_used == 176);
    wrong += d.sign != 1;
  }
  CHECK(wrong < 50);
  const std::vector<double> few(5, 1.0);
  CHECK_THROWS(sign_decision(few, 0.5, 11));
  CHECK_THROWS(sign_decision(few, 3, 2));
  CHECK(sign_decision(few, 3, 5).sign == 1);
}

TEST_CASE("experiments needed") {
  CHECK(experiments_needed(0.1, 1, 1) == 3);
  CHECK(experiments_needed(0.1, 1e6, 1) == 1);
  CHECK(experiments_needed(std::exp(-1.0), 1, 1) == 1);
  CHECK(experiments_needed(std::exp(-1.0), 1, 0.5) == 4);
  CHECK_THROWS(experiments_needed(1.5, 1, 1));
}

TEST_CASE("verify suites") {
  for (const auto& name : verify_suite_names())
    for (const auto& c : run_verify_suite(name, 1)) {
      INFO(name << ": " << c.name << " measured " << c.measured << " expected " << c.expected);
      CHECK(c.pass);
    }
  CHECK_THROWS(run_verify_suite("nope", 1));
}

TEST_CASE("variance report csv") {
  std::ostringstream os;
  const VarianceReportRow row{"two_transitive", 2, 0.5, 1, 0.25, 0.125, 10, 3};
  write_variance_report(os, std::span(&row, 1));
  CHECK(os.str() == "method,n,exact,bound,empirical,stderr,trials,seed\ntwo_transitive,2,0.5,1,0.25,0.125,10,3\n");
}
