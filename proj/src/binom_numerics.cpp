#include "extdeg/binom_numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace extdeg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kHalfLog2Pi = 0.9189385332046727417803297;
constexpr long double kSqrt2L = 1.41421356237309504880168872420969808L;

constexpr std::int64_t kDirectSummationLimit = 10000;

[[noreturn]] void fail(const std::string& what) { throw std::domain_error(what); }

// Kahan-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

void BinomialSpec::validate() const {
  if (trials < 0) fail("BinomialSpec: trials must be >= 0");
  if (!(success_prob > 0.0 && success_prob < 1.0))
    fail("BinomialSpec: success_prob must lie in (0,1)");
}

namespace detail {

// log(n!) - log(sqrt(2 pi n) (n/e)^n). Table below 16, asymptotic series
// above (Loader's dbinom decomposition).
double stirling_error(std::int64_t n) {
  static const auto table = [] {
    std::array<double, 16> t{};
    t[0] = 0.0;
    double log_factorial = 0.0;
    for (int i = 1; i < 16; ++i) {
      log_factorial += std::log(static_cast<double>(i));
      t[i] = log_factorial + i - kHalfLog2Pi - (i + 0.5) * std::log(static_cast<double>(i));
    }
    return t;
  }();
  if (n < 16) return table[static_cast<std::size_t>(n)];
  constexpr double S0 = 1.0 / 12.0, S1 = 1.0 / 360.0, S2 = 1.0 / 1260.0,
                   S3 = 1.0 / 1680.0, S4 = 1.0 / 1188.0;
  const double n1 = 1.0 / static_cast<double>(n);
  const double n2 = n1 * n1;
  if (n > 500) return (S0 - S1 * n2) * n1;
  if (n > 80) return (S0 - (S1 - S2 * n2) * n2) * n1;
  if (n > 35) return (S0 - (S1 - (S2 - S3 * n2) * n2) * n2) * n1;
  return (S0 - (S1 - (S2 - (S3 - S4 * n2) * n2) * n2) * n2) * n1;
}

// x log(x/np) + np - x without cancellation when x is near np.
double binom_deviance(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    const double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double term = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1;; ++j) {
      term *= v2;
      const double s1 = s + term / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

}  // namespace detail

double log_binom_pmf(const BinomialSpec& spec, std::int64_t k) {
  spec.validate();
  const std::int64_t n = spec.trials;
  if (k < 0 || k > n) fail("log_binom_pmf: k outside 0..trials");
  const double p = spec.success_prob, q = 1.0 - p;
  if (n == 0) return 0.0;
  if (k == 0) return static_cast<double>(n) * std::log1p(-p);
  if (k == n) return static_cast<double>(n) * std::log(p);
  const double nd = static_cast<double>(n), kd = static_cast<double>(k),
               nk = static_cast<double>(n - k);
  const double lc = detail::stirling_error(n) - detail::stirling_error(k) -
                    detail::stirling_error(n - k) -
                    detail::binom_deviance(kd, nd * p) -
                    detail::binom_deviance(nk, nd * q);
  return lc + 0.5 * (std::log(nd) - std::log(kTwoPi) - std::log(kd) - std::log(nk));
}

double binom_pmf(const BinomialSpec& spec, std::int64_t k) {
  return std::exp(log_binom_pmf(spec, k));
}

namespace detail {

double binom_tail_direct(const BinomialSpec& spec, std::int64_t kmin) {
  const std::int64_t n = spec.trials;
  const double p = spec.success_prob, q = 1.0 - p;
  std::int64_t anchor = static_cast<std::int64_t>(
      std::floor(static_cast<double>(n + 1) * p));
  if (anchor < kmin) anchor = kmin;
  if (anchor > n) anchor = n;

  const double pa = std::exp(log_binom_pmf(spec, anchor));
  CompensatedSum acc;
  acc.add(pa);
  const double up_ratio_base = p / q;
  double term = pa;
  for (std::int64_t k = anchor + 1; k <= n; ++k) {
    term *= static_cast<double>(n - k + 1) / static_cast<double>(k) * up_ratio_base;
    acc.add(term);
    if (term < acc.sum * 1e-18) break;
  }
  term = pa;
  for (std::int64_t k = anchor - 1; k >= kmin; --k) {
    term *= static_cast<double>(k + 1) / static_cast<double>(n - k) / up_ratio_base;
    acc.add(term);
    if (term < acc.sum * 1e-18) break;
  }
  return acc.sum < 1.0 ? acc.sum : 1.0;
}

namespace {

// Continued fraction for the regularized incomplete beta I_x(a,b)
// (modified Lentz). Requires x below the (a+1)/(a+b+2) switch point.
double incomplete_beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double result = d;
  for (int m = 1; m <= 200000; ++m) {
    const double md = static_cast<double>(m);
    // even step
    double numer = md * (b - md) * x / ((a + 2.0 * md - 1.0) * (a + 2.0 * md));
    d = 1.0 + numer * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    result *= d * c;
    // odd step
    numer = -(a + md) * (a + b + md) * x / ((a + 2.0 * md) * (a + 2.0 * md + 1.0));
    d = 1.0 + numer * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    result *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return result;
}

}  // namespace

// P(B >= kmin) = I_p(kmin, n - kmin + 1). The front factor
// x^a y^b / (a B(a,b)) equals (1-p) * pmf(kmin), which Loader's log-pmf
// delivers at full relative accuracy even for n ~ 1e8 (a huge-argument
// lgamma difference would not).
double binom_tail_beta(const BinomialSpec& spec, std::int64_t kmin) {
  const std::int64_t n = spec.trials;
  const double p = spec.success_prob;
  const double a = static_cast<double>(kmin);
  const double b = static_cast<double>(n - kmin + 1);
  const double log_front = log_binom_pmf(spec, kmin) + std::log1p(-p);
  if (p < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * incomplete_beta_cf(p, a, b);
  }
  const double complement =
      std::exp(log_front + std::log(a) - std::log(b)) *
      incomplete_beta_cf(1.0 - p, b, a);
  double tail = 1.0 - complement;
  if (tail < 0.0) tail = 0.0;
  return tail;
}

}  // namespace detail

double binom_tail(const BinomialSpec& spec, double threshold) {
  spec.validate();
  const std::int64_t n = spec.trials;
  if (threshold < 0.0) return 1.0;
  if (threshold >= static_cast<double>(n)) return 0.0;
  const std::int64_t kmin = static_cast<std::int64_t>(std::floor(threshold)) + 1;
  if (kmin <= 0) return 1.0;
  if (kmin > n) return 0.0;
  return n <= kDirectSummationLimit ? detail::binom_tail_direct(spec, kmin)
                                    : detail::binom_tail_beta(spec, kmin);
}

double binom_tail(const TailQuery& query) {
  return binom_tail(query.spec, query.threshold);
}

double normal_cdf(double x) {
  return static_cast<double>(
      0.5L * std::erfc(-static_cast<long double>(x) / kSqrt2L));
}

double normal_tail(double x) {
  return static_cast<double>(
      0.5L * std::erfc(static_cast<long double>(x) / kSqrt2L));
}

double log_mills_tail(double x) {
  if (!(x > 0.0)) fail("log_mills_tail: requires x > 0");
  return -0.5 * x * x - std::log(x) - kHalfLog2Pi;
}

double mills_tail_approx(double x) { return std::exp(log_mills_tail(x)); }

double local_clt_pmf(const BinomialSpec& spec, std::int64_t k) {
  spec.validate();
  const double n = static_cast<double>(spec.trials);
  const double p = spec.success_prob, q = 1.0 - p;
  const double v = n * p * q;
  const double z = static_cast<double>(k) - n * p;
  return std::exp(-z * z / (2.0 * v)) / std::sqrt(kTwoPi * v);
}

UspenskyLocal uspensky_local(const BinomialSpec& spec, double w) {
  spec.validate();
  const double n = static_cast<double>(spec.trials);
  const double p = spec.success_prob, q = 1.0 - p;
  const double npq = n * p * q;
  if (npq < 25.0) fail("uspensky_local: requires npq >= 25");
  const double k_real = n * p + w * std::sqrt(npq);
  if (std::fabs(k_real - std::nearbyint(k_real)) > 1e-6 * std::max(1.0, std::fabs(k_real)))
    fail("uspensky_local: np + w sqrt(npq) must be an integer (round k first)");
  if (k_real < -0.5 || k_real > n + 0.5)
    fail("uspensky_local: np + w sqrt(npq) outside 0..trials");

  UspenskyLocal r;
  const double cubic = (q - p) * (w * w * w - 3.0 * w) / (6.0 * std::sqrt(npq));
  r.approx = std::exp(-0.5 * w * w) / std::sqrt(kTwoPi * npq) * (1.0 + cubic);
  r.delta_bound = (0.15 + 0.25 * std::fabs(p - q)) / (npq * std::sqrt(npq)) +
                  std::exp(-1.5 * std::sqrt(npq));
  return r;
}

double berry_esseen_constant() {
  static const double c = static_cast<double>(
      (std::sqrt(10.0L) + 3.0L) /
      (6.0L * std::sqrt(2.0L * 3.14159265358979323846264338327950288L)));
  return c;
}

double berry_esseen_bound(const BinomialSpec& spec) {
  spec.validate();
  if (spec.trials < 2) fail("berry_esseen_bound: requires trials >= 2");
  const double p = spec.success_prob, q = 1.0 - p;
  return berry_esseen_constant() * (p * p + q * q) /
         (std::sqrt(p * q) * std::sqrt(static_cast<double>(spec.trials)));
}

}  // namespace extdeg
