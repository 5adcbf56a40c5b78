#include "tempavg/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace tempavg {

namespace {

using Mat = Eigen::MatrixXcd;

double tr2(const Mat& a) { return (a * a).trace().real(); }
double dmax(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

double dim_of(int n) { return std::ldexp(1.0, n); }

void require_n(const DensityMatrix& rho, const Mat& sigma) {
  if (rho.n_qubits() < 2) throw std::invalid_argument("variance formulas need n >= 2");
  if (sigma.rows() != rho.dim() || sigma.cols() != rho.dim())
    throw std::invalid_argument("observable and state dimensions differ");
}

// Runs body(t) for t in [0, count) across threads, rethrowing the first error.
template <class F>
void parallel_for(int count, int threads, F body) {
  const int n_threads = std::clamp(threads, 1, std::max(count, 1));
  if (n_threads == 1) {
    for (int t = 0; t < count; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int t = w; t < count; t += n_threads) body(t);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct RhoTraces {
  double big_n, d2, d, not0_2, zero_2, all2;
};

RhoTraces rho_traces(const DensityMatrix& rho) {
  const DeviationParts p = deviation_parts(rho);
  return {static_cast<double>(rho.dim()), tr2(p.check_d), p.check_d.trace().real(), tr2(p.check_not0),
          tr2(p.check_0), tr2(p.check)};
}

}  // namespace

// ---------------------------------------------------------------------------

std::string snr_method_name(SnrMethod m) {
  switch (m) {
    case SnrMethod::Exhaustive:
      return "exhaustive";
    case SnrMethod::RandomizedFlipSwap:
      return "randomized_flip_swap";
    case SnrMethod::LabeledFlipSwap:
      return "labeled_flip_swap";
    case SnrMethod::TwoTransitive:
      return "two_transitive";
    case SnrMethod::ConditionalNormalizer:
      return "conditional_normalizer";
    case SnrMethod::FullyRandomizedFlipSwap:
      return "fully_randomized_flip_swap";
  }
  return "unknown";
}

std::vector<SnrMethod> all_snr_methods() {
  return {SnrMethod::Exhaustive,    SnrMethod::RandomizedFlipSwap,    SnrMethod::LabeledFlipSwap,
          SnrMethod::TwoTransitive, SnrMethod::ConditionalNormalizer, SnrMethod::FullyRandomizedFlipSwap};
}

SnrMethod snr_method_from_name(const std::string& s) {
  for (SnrMethod m : all_snr_methods())
    if (snr_method_name(m) == s) return m;
  throw std::invalid_argument("unknown snr method: " + s);
}

int experiments_per_signal(SnrMethod m, int n) {
  switch (m) {
    case SnrMethod::Exhaustive:
      return (1 << n) - 1;
    case SnrMethod::RandomizedFlipSwap:
    case SnrMethod::LabeledFlipSwap:
    case SnrMethod::FullyRandomizedFlipSwap:
      return 2;
    default:
      return 1;
  }
}

double snr_bound(SnrMethod m, const SnrInputs& in) {
  if (in.n < 2 || in.n > 62) throw std::invalid_argument("snr_bound: n must be in [2, 62]");
  if (!(in.snr1 > 0)) throw std::invalid_argument("snr_bound: snr1 must be positive");
  if (std::abs(in.x) > 1) throw std::invalid_argument("snr_bound: |x| must be <= 1");
  const double n = in.n;
  const double big_n = dim_of(in.n);
  const double s1 = in.snr1;
  const double ax = std::abs(in.x);
  const double pre = n / big_n * ax * s1;
  switch (m) {
    case SnrMethod::Exhaustive:
      return pre * std::sqrt(big_n - 1);
    case SnrMethod::RandomizedFlipSwap:
      return pre / std::sqrt(0.5 + n * n * s1 * s1 / (big_n * (big_n - 2)));
    case SnrMethod::LabeledFlipSwap:
      return std::sqrt(2.0) * (n + 1) * ax * s1 / big_n;
    case SnrMethod::TwoTransitive:
      return pre / std::sqrt(1 + n * s1 * s1 / (big_n - 2));
    case SnrMethod::ConditionalNormalizer:
      return pre / std::sqrt(1 + 2 * n * s1 * s1 / (big_n * (big_n - 1)));
    case SnrMethod::FullyRandomizedFlipSwap:
      return pre / std::sqrt(0.5 + 2 * n * n * s1 * s1 / (big_n * big_n * (big_n - 1)));
  }
  throw std::invalid_argument("unknown snr method");
}

void write_snr_curves(std::ostream& os, std::span<const SnrMethod> methods, int n_lo, int n_hi, double snr1,
                      double x) {
  if (n_lo < 2 || n_hi < n_lo || n_hi > 62) throw std::invalid_argument("snr curves: bad n range");
  const auto old = os.precision(17);
  os << "# snr1 = delta/s per measurement; experiments per signal: exhaustive 2^n-1, flip&swap variants 2,"
        " group randomization 1\n";
  os << "method,n,snr1,x,snr_bound\n";
  for (SnrMethod m : methods)
    for (int n = n_lo; n <= n_hi; ++n)
      os << snr_method_name(m) << ',' << n << ',' << snr1 << ',' << x << ',' << snr_bound(m, {n, snr1, x}) << '\n';
  os.precision(old);
}

// ---------------------------------------------------------------------------

double variance_exact_two_transitive(const DensityMatrix& rho, const Mat& sigma) {
  require_n(rho, sigma);
  const RhoTraces r = rho_traces(rho);
  const SigmaParts s = sigma_parts(sigma);
  const double sd2 = tr2(s.d), sd = s.d.trace().real(), s0b2 = tr2(s.not0), s02 = tr2(s.zero);
  const double n1 = r.big_n - 1, n2 = r.big_n - 2;
  return r.d2 * sd2 / n1 + (r.d * r.d - r.d2) * (sd * sd - sd2) / (n1 * n2) +
         (r.not0_2 - r.d2) * (s0b2 - sd2) / (n1 * n2) + r.zero_2 * s02 / (2 * n1);
}

double variance_exact_cyclic(const DensityMatrix& rho, const Mat& sigma, const GF2nField& field) {
  require_n(rho, sigma);
  if (field.degree() != rho.n_qubits()) throw std::invalid_argument("variance_exact_cyclic: field degree mismatch");
  const DeviationParts p = deviation_parts(rho);
  const Mat& c = p.check;
  const Eigen::Index big_n = rho.dim();
  const double n1 = static_cast<double>(big_n - 1);
  // pi^s(i) = g^s * i on the nonzero states.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(big_n));
  for (Eigen::Index i = 0; i < big_n; ++i) perm[static_cast<std::size_t>(i)] = i;
  const GF2nElement g = field.generator();
  double v = 0;
  for (Eigen::Index s = 0; s < big_n - 1; ++s) {
    double a = 0, b = 0, cc = 0, d = 0;
    for (Eigen::Index i = 1; i < big_n; ++i) {
      const Eigen::Index j = perm[static_cast<std::size_t>(i)];
      a += (c(i, i) * c(j, j)).real();
      b += (sigma(i, i) * sigma(j, j)).real();
      cc += (c(i, j) * c(j, i)).real();
      d += (sigma(i, j) * sigma(j, i)).real();
    }
    v += a * b / n1;
    if (s > 0) v += cc * d / n1;
    for (Eigen::Index i = 1; i < big_n; ++i) {
      auto& j = perm[static_cast<std::size_t>(i)];
      j = gf2n_mul(field.element(static_cast<std::uint32_t>(j)), g).bits;
    }
  }
  const SigmaParts sp = sigma_parts(sigma);
  v += tr2(p.check_0) * tr2(sp.zero) / (2 * n1);
  return v;
}

double variance_enumerated(std::span<const GroupKind> sequence, const DensityMatrix& rho, const Mat& sigma) {
  require_n(rho, sigma);
  const int n = rho.n_qubits();
  std::vector<std::vector<Mat>> groups;
  for (GroupKind k : sequence) {
    std::vector<Mat> us;
    for (const auto& c : enumerate_group(k, n)) us.push_back(unitary(c));
    groups.push_back(std::move(us));
  }
  // Push the set of conjugated deviations through each group in turn.
  std::vector<Mat> states{deviation_parts(rho).check};
  for (const auto& g : groups) {
    std::vector<Mat> next;
    next.reserve(states.size() * g.size());
    for (const auto& s : states)
      for (const auto& u : g) next.push_back(u * s * u.adjoint());
    states = std::move(next);
  }
  double acc = 0;
  for (const auto& s : states) {
    const double r = (s * sigma).trace().real();
    acc += r * r;
  }
  return acc / static_cast<double>(states.size());
}

double variance_bound_two_transitive(const DensityMatrix& rho) {
  const RhoTraces r = rho_traces(rho);
  return r.d2 + r.all2 / (r.big_n - 2);
}

double variance_bound_unitary(const DensityMatrix& rho) {
  if (rho.n_qubits() < 2) throw std::invalid_argument("variance bound needs n >= 2");
  const RhoTraces r = rho_traces(rho);
  return r.all2 / (r.big_n - 2);
}

double variance_bound_conditional(const DensityMatrix& rho, int k) {
  if (k < 0) throw std::invalid_argument("variance_bound_conditional: k must be >= 0");
  if (rho.n_qubits() < 2) throw std::invalid_argument("variance bound needs n >= 2");
  const RhoTraces r = rho_traces(rho);
  const double lambda = std::exp(1 / (r.big_n + 2)) / 2;
  return std::pow(lambda, k) * r.big_n / (r.big_n - 2) * r.d2 + r.all2 / (r.big_n - 2);
}

double variance_bound_fully_randomized(int n, double delta) {
  if (n < 2) throw std::invalid_argument("variance bound needs n >= 2");
  const double big_n = dim_of(n);
  return 2.0 * n * n * delta * delta / (big_n * big_n * (big_n - 1));
}

// ---------------------------------------------------------------------------

FourTensorCoefficients initial_coefficients(const DensityMatrix& rho) {
  if (rho.n_qubits() < 2) throw std::invalid_argument("initial_coefficients: n must be >= 2");
  const RhoTraces r = rho_traces(rho);
  const double n1 = r.big_n - 1, n12 = (r.big_n - 1) * (r.big_n - 2);
  FourTensorCoefficients c;
  c.gamma = (r.d * r.d - r.d2) / n12;
  c.beta = (r.not0_2 - r.d2) / n12;
  c.alpha = r.d2 / n1 - c.gamma - c.beta;
  c.delta = r.zero_2 / (2 * n1);
  return c;
}

FourTensorCoefficients recursion_coefficients(const FourTensorCoefficients& c0, int n, int k) {
  if (n < 2) throw std::invalid_argument("recursion_coefficients: n must be >= 2");
  if (k < 0) throw std::invalid_argument("recursion_coefficients: k must be >= 0");
  const double big_n = dim_of(n);
  const double keep = 1 - big_n * big_n / (2 * (big_n - 1) * (big_n + 2));
  const double leak = big_n / (2 * (big_n + 2) * (big_n - 1));
  FourTensorCoefficients c = c0;
  for (int i = 0; i < k; ++i) {
    c.beta += leak * c.alpha;
    c.gamma += leak * c.alpha;
    c.alpha *= keep;
  }
  return c;
}

double variance_from_coefficients(const FourTensorCoefficients& c, const Mat& sigma) {
  const SigmaParts s = sigma_parts(sigma);
  const double sd = s.d.trace().real();
  return c.alpha * tr2(s.d) + c.beta * tr2(s.not0) + c.gamma * sd * sd + c.delta * tr2(s.zero);
}

double variance_exact_conditional(const DensityMatrix& rho, const Mat& sigma, int k) {
  require_n(rho, sigma);
  return variance_from_coefficients(recursion_coefficients(initial_coefficients(rho), rho.n_qubits(), k), sigma);
}

FourTensorBasis::FourTensorBasis(int n, int control) : n_(n), control_(control) {
  if (n < 2 || n > 3) throw std::invalid_argument("FourTensorBasis: dense realization needs 2 <= n <= 3");
  if (control < 0 || control >= n) throw std::invalid_argument("FourTensorBasis: control out of range");
}

bool FourTensorBasis::in_sector(Eigen::Index i, int a) const {
  return i >= 1 && static_cast<int>((i >> (n_ - 1 - control_)) & 1) == a;
}

Mat FourTensorBasis::tensor(Tensor t) const {
  const Eigen::Index big_n = Eigen::Index{1} << n_;
  Mat m = Mat::Zero(big_n * big_n, big_n * big_n);
  for (Eigen::Index i = 1; i < big_n; ++i) {
    switch (t) {
      case Tensor::D:
        m(i * big_n + i, i * big_n + i) = 1;
        break;
      case Tensor::E:
        for (Eigen::Index j = 1; j < big_n; ++j) m(i * big_n + j, i * big_n + j) = 1;
        break;
      case Tensor::J:
        for (Eigen::Index j = 1; j < big_n; ++j) m(i * big_n + j, j * big_n + i) = 1;
        break;
      case Tensor::Z1:  // |0><i| (x) |i><0|
        m(i, i * big_n) = 1;
        break;
      case Tensor::Z2:  // |i><0| (x) |0><i|
        m(i * big_n, i) = 1;
        break;
    }
  }
  return m;
}

Mat FourTensorBasis::d_sector(int a) const {
  const Eigen::Index big_n = Eigen::Index{1} << n_;
  Mat m = Mat::Zero(big_n * big_n, big_n * big_n);
  for (Eigen::Index i = 1; i < big_n; ++i)
    if (in_sector(i, a)) m(i * big_n + i, i * big_n + i) = 1;
  return m;
}

Mat FourTensorBasis::e_sector(int a, int b) const {
  const Eigen::Index big_n = Eigen::Index{1} << n_;
  Mat m = Mat::Zero(big_n * big_n, big_n * big_n);
  for (Eigen::Index i = 1; i < big_n; ++i)
    for (Eigen::Index j = 1; j < big_n; ++j)
      if (in_sector(i, a) && in_sector(j, b)) m(i * big_n + j, i * big_n + j) = 1;
  return m;
}

Mat FourTensorBasis::j_sector(int a, int b) const {
  const Eigen::Index big_n = Eigen::Index{1} << n_;
  Mat m = Mat::Zero(big_n * big_n, big_n * big_n);
  for (Eigen::Index i = 1; i < big_n; ++i)
    for (Eigen::Index j = 1; j < big_n; ++j)
      if (in_sector(i, a) && in_sector(j, b)) m(i * big_n + j, j * big_n + i) = 1;
  return m;
}

Mat FourTensorBasis::realize(const FourTensorCoefficients& c) const {
  return c.alpha * tensor(Tensor::D) + c.beta * tensor(Tensor::J) + c.gamma * tensor(Tensor::E) +
         c.delta * (tensor(Tensor::Z1) + tensor(Tensor::Z2));
}

FourTensorCoefficients FourTensorBasis::extract(const Mat& r, double* residual) const {
  const std::vector<Mat> basis{tensor(Tensor::D), tensor(Tensor::J), tensor(Tensor::E),
                               tensor(Tensor::Z1) + tensor(Tensor::Z2)};
  Eigen::Matrix4d gram;
  Eigen::Vector4d rhs;
  for (int a = 0; a < 4; ++a) {
    rhs(a) = (basis[a].conjugate().cwiseProduct(r)).sum().real();
    for (int b = 0; b < 4; ++b) gram(a, b) = (basis[a].conjugate().cwiseProduct(basis[b])).sum().real();
  }
  const Eigen::Vector4d x = gram.ldlt().solve(rhs);
  const FourTensorCoefficients c{x(0), x(1), x(2), x(3)};
  if (residual) *residual = dmax(r, realize(c));
  return c;
}

Mat FourTensorBasis::twirl(const Mat& r, std::span<const Circuit> group) {
  if (group.empty()) throw std::invalid_argument("twirl: empty group");
  Mat acc = Mat::Zero(r.rows(), r.cols());
  for (const auto& c : group) {
    const Mat u = unitary(c);
    Mat uu(u.rows() * u.rows(), u.cols() * u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i)
      for (Eigen::Index j = 0; j < u.cols(); ++j) uu.block(i * u.rows(), j * u.cols(), u.rows(), u.cols()) = u(i, j) * u;
    acc += uu * r * uu.adjoint();
  }
  return acc / static_cast<double>(group.size());
}

Mat FourTensorBasis::square(const Mat& rho) {
  const Eigen::Index d = rho.rows();
  Mat out(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out.block(i * d, j * d, d, d) = rho(i, j) * rho;
  return out;
}

// ---------------------------------------------------------------------------

VarianceEstimate sample_moments(std::span<const double> values) {
  VarianceEstimate e;
  e.trials = static_cast<int>(values.size());
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0, m4 = 0;
  for (double v : values) {
    const double d = (v - mean) * (v - mean);
    m2 += d;
    m4 += d * d;
  }
  e.mean = mean;
  if (values.size() < 2) return e;
  e.variance = m2 / (n - 1);
  m4 /= n;
  e.stderr_mean = std::sqrt(e.variance / n);
  const double var_of_var = (m4 - e.variance * e.variance * (n - 3) / (n - 1)) / n;
  e.stderr_variance = std::sqrt(std::max(var_of_var, 0.0));
  return e;
}

VarianceEstimate empirical_variance(const PlanSampler& sampler, const DensityMatrix& rho0, const Circuit& computation,
                                    int trials, std::uint64_t seed, int threads) {
  if (trials < 2) throw std::invalid_argument("empirical_variance: trials must be >= 2");
  std::vector<double> values(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    Rng rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const PreparationPlan plan = sample_plan(sampler, rng);
    values[static_cast<std::size_t>(t)] = noiseless_value(plan, rho0, computation);
  });
  return sample_moments(values);
}

bool within_bound(const VarianceEstimate& e, double bound) {
  const double rel = e.variance > 0 ? e.stderr_variance / e.variance : 0.0;
  return e.variance <= bound * (1 + 4 * rel) + 1e-300;
}

int block_size(double snr) {
  if (!(snr > 0)) throw std::invalid_argument("block_size: snr must be positive");
  return std::max(1, static_cast<int>(std::ceil(4 / (snr * snr))));
}

SignDecision sign_decision(std::span<const double> stream, double snr, int k1) {
  if (k1 < 1 || k1 % 2 == 0) throw std::invalid_argument("sign_decision: k1 must be odd and positive");
  SignDecision out;
  out.k2 = block_size(snr);
  const std::size_t need = static_cast<std::size_t>(k1) * static_cast<std::size_t>(out.k2);
  if (stream.size() < need) throw std::invalid_argument("sign_decision: insufficient samples");
  std::vector<double> means(static_cast<std::size_t>(k1));
  for (int b = 0; b < k1; ++b) {
    double s = 0;
    for (int i = 0; i < out.k2; ++i) s += stream[static_cast<std::size_t>(b * out.k2 + i)];
    means[static_cast<std::size_t>(b)] = s / out.k2;
  }
  auto mid = means.begin() + k1 / 2;
  std::nth_element(means.begin(), mid, means.end());
  out.sign = (*mid > 0) - (*mid < 0);
  out.samples_used = static_cast<int>(need);
  return out;
}

int experiments_needed(double confidence, double snr, double epsilon) {
  if (!(confidence > 0 && confidence < 1)) throw std::invalid_argument("experiments_needed: confidence in (0, 1)");
  if (!(snr > 0) || !(epsilon > 0)) throw std::invalid_argument("experiments_needed: snr and epsilon must be positive");
  const double v = std::log(1 / confidence) / (epsilon * epsilon * snr * snr);
  if (!(v < 2e9)) throw std::overflow_error("experiments_needed: count exceeds int range");
  return std::max(1, static_cast<int>(std::ceil(v)));
}

// ---------------------------------------------------------------------------

namespace {

CheckResult check_close(std::string name, double measured, double expected, double tol) {
  return {std::move(name), measured, expected, std::abs(measured - expected) <= tol};
}

CheckResult check_leq(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, measured <= bound};
}

DensityMatrix random_diagonal_state(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(std::size_t{1} << n);
  double s = 0;
  for (auto& v : p) s += (v = u(rng));
  for (auto& v : p) v /= s;
  return DensityMatrix::diagonal(p);
}

std::vector<CheckResult> suite_symplectic() {
  std::vector<CheckResult> out;
  for (int n = 1; n <= 2; ++n)
    out.push_back(check_close("enumerated symplectic count n=" + std::to_string(n),
                              static_cast<double>(enumerate_symplectic(n).size()),
                              symplectic_count(n).convert_to<double>(), 0));
  Rng rng(1);
  for (int n = 1; n <= 4; ++n) {
    int bad = 0;
    for (int t = 0; t < 200; ++t) bad += !is_symplectic(random_symplectic(n, rng));
    out.push_back(check_close("random symplectic samples n=" + std::to_string(n) + " non-symplectic", bad, 0, 0));
  }
  return out;
}

std::vector<CheckResult> suite_groups(std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (int n = 1; n <= 2; ++n)
    out.push_back(check_close("phase independence n=" + std::to_string(n), verify_phase_independence(n), 1, 0));
  Rng rng(seed);
  for (int n = 1; n <= 3; ++n) {
    int bad = 0;
    for (int t = 0; t < 100; ++t) {
      const NormalizerElement e = sample_normalizer(n, rng);
      const PauliAction a = conjugation_action(element_to_circuit(e));
      bad += !(a.x == e.x && a.l == e.l);
    }
    out.push_back(check_close("normalizer synthesis mismatches n=" + std::to_string(n), bad, 0, 0));
  }
  for (int n = 2; n <= 3; ++n) {
    const DensityMatrix rho = random_diagonal_state(n, rng);
    const GroupKind seq[] = {GroupKind::Diagonal, GroupKind::Linear};
    const double err = dmax(enumerate_expectation(seq, rho).matrix(), effective_pure_target(rho).matrix());
    out.push_back(check_leq("D x T average vs target n=" + std::to_string(n), err, 1e-12));
  }
  return out;
}

std::vector<CheckResult> suite_variances(std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed);
  const int n = 2;
  const Mat z = Observable::sigma_z1(n).matrix;
  double worst_tt = 0, worst_cy = 0, worst_bound = 0;
  const GF2nField field(n);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_diagonal_state(n, rng);
    const Mat sigma = Observable::conjugated(element_to_circuit(sample_normalizer(n, rng))).matrix;
    for (const Mat* s : {&z, &sigma}) {
      const GroupKind tt[] = {GroupKind::Diagonal, GroupKind::Linear};
      const GroupKind cy[] = {GroupKind::Diagonal, GroupKind::Cyclic};
      const double ex = variance_exact_two_transitive(rho, *s);
      worst_tt = std::max(worst_tt, std::abs(ex - variance_enumerated(tt, rho, *s)));
      worst_cy = std::max(worst_cy, std::abs(variance_exact_cyclic(rho, *s, field) - variance_enumerated(cy, rho, *s)));
      worst_bound = std::max(worst_bound, ex - variance_bound_two_transitive(rho));
    }
  }
  out.push_back(check_leq("two-transitive exact vs enumeration, max error", worst_tt, 1e-12));
  out.push_back(check_leq("cyclic exact vs enumeration, max error", worst_cy, 1e-12));
  out.push_back(check_leq("two-transitive exact minus bound, max", worst_bound, 1e-15));

  // Recursion coefficients against dense four-tensor averaging.
  const FourTensorBasis basis(n, n - 1);
  const DensityMatrix rho = random_diagonal_state(n, rng);
  const Mat check = deviation_parts(rho).check;
  const auto dg = enumerate_group(GroupKind::Diagonal, n);
  const auto tg = enumerate_group(GroupKind::Linear, n);
  const auto ng = enumerate_group(GroupKind::ConditionalNormalizer, n);
  Mat r = FourTensorBasis::twirl(FourTensorBasis::twirl(FourTensorBasis::square(check), dg), tg);
  const FourTensorCoefficients c0 = initial_coefficients(rho);
  double worst = 0;
  for (int k = 0; k <= 2; ++k) {
    double residual = 0;
    const FourTensorCoefficients got = basis.extract(r, &residual);
    const FourTensorCoefficients want = recursion_coefficients(c0, n, k);
    worst = std::max({worst, residual, std::abs(got.alpha - want.alpha), std::abs(got.beta - want.beta),
                      std::abs(got.gamma - want.gamma), std::abs(got.delta - want.delta)});
    r = FourTensorBasis::twirl(FourTensorBasis::twirl(r, ng), tg);
  }
  out.push_back(check_leq("recursion coefficients vs dense averaging, max error", worst, 1e-12));
  return out;
}

std::vector<CheckResult> suite_protocols(std::uint64_t seed) {
  std::vector<CheckResult> out;
  Rng rng(seed);
  for (int n = 2; n <= 3; ++n) {
    const std::string tag = " n=" + std::to_string(n);
    const DensityMatrix flat = DensityMatrix::maximally_mixed(n);
    const Circuit none(n);
    out.push_back(check_close("exhaustive on I/N" + tag, noiseless_value(exhaustive_plan(n), flat, none), 0, 1e-15));
    out.push_back(check_close("flip_swap on I/N" + tag, noiseless_value(flip_swap_plan(n), flat, none), 0, 1e-15));
    out.push_back(check_close("randomized_flip_swap on I/N" + tag,
                              noiseless_value(randomized_flip_swap_plan(n, rng), flat, none), 0, 1e-15));
    out.push_back(check_close("labeled_flip_swap on I/N" + tag,
                              noiseless_value(labeled_flip_swap_plan(n), DensityMatrix::maximally_mixed(n + 1), none),
                              0, 1e-15));
    out.push_back(check_close("fully_randomized_flip_swap on I/N" + tag,
                              noiseless_value(fully_randomized_flip_swap_plan(n, 1, rng), flat, none), 0, 1e-15));
    out.push_back(check_close("group_randomization on I/N" + tag,
                              noiseless_value(group_randomization_plan(n, 1, rng), flat, none), 0, 1e-15));
    out.push_back(check_close(
        "entanglement on I/N" + tag,
        noiseless_value(entanglement_plan(n), DensityMatrix::maximally_mixed(2 * n), none), 0, 1e-15));
    const DensityMatrix rho = random_diagonal_state(n, rng);
    out.push_back(check_leq("exhaustive average vs target" + tag,
                            dmax(average_prepared_state(exhaustive_plan(n), rho).matrix(),
                                 effective_pure_target(rho).matrix()),
                            1e-12));
  }
  std::vector<double> p{1, 0.6, -0.6, -1};
  for (auto& v : p) v = 0.25 + 1e-5 * v;
  out.push_back(check_close("two-qubit example signal",
                            noiseless_value(exhaustive_plan(2), DensityMatrix::diagonal(p), Circuit(2)), 4e-5 / 3,
                            1e-15));
  return out;
}

}  // namespace

std::vector<std::string> verify_suite_names() { return {"groups", "variances", "protocols", "symplectic"}; }

std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed) {
  if (suite == "symplectic") return suite_symplectic();
  if (suite == "groups") return suite_groups(seed);
  if (suite == "variances") return suite_variances(seed);
  if (suite == "protocols") return suite_protocols(seed);
  throw std::invalid_argument("unknown verify suite: " + suite);
}

void write_variance_report(std::ostream& os, std::span<const VarianceReportRow> rows) {
  const auto old = os.precision(17);
  os << "method,n,exact,bound,empirical,stderr,trials,seed\n";
  for (const auto& r : rows)
    os << r.method << ',' << r.n << ',' << r.exact << ',' << r.bound << ',' << r.empirical << ',' << r.stderr_value
       << ',' << r.trials << ',' << r.seed << '\n';
  os.precision(old);
}

}  // namespace tempavg
