#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "extdeg/binom_numerics.hpp"

using extdeg::BinomialSpec;
using extdeg::TailQuery;

namespace {

constexpr long double kPiL = 3.14159265358979323846264338327950288L;

// --- independent oracles (extended precision, separate algorithms) --------

// log C(n,k) as an explicit compensated product-of-ratios; no lgamma involved.
long double ld_log_choose(std::int64_t n, std::int64_t k) {
  if (k > n - k) k = n - k;
  long double sum = 0.0L, carry = 0.0L;
  for (std::int64_t i = 1; i <= k; ++i) {
    const long double term =
        std::log(static_cast<long double>(n - k + i) / static_cast<long double>(i));
    const long double y = term - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

long double ld_binom_pmf(std::int64_t n, long double p, std::int64_t k) {
  return std::exp(ld_log_choose(n, k) +
                  static_cast<long double>(k) * std::log(p) +
                  static_cast<long double>(n - k) * std::log(1.0L - p));
}

// P(B > y) by plain high-precision summation over the support.
long double ld_binom_tail(std::int64_t n, long double p, long double y) {
  long double sum = 0.0L;
  for (std::int64_t k = 0; k <= n; ++k)
    if (static_cast<long double>(k) > y) sum += ld_binom_pmf(n, p, k);
  return sum;
}

// Standard normal upper tail. Taylor series of the CDF around 0 for
// small |x|, Mills-ratio continued fraction for x >= 3; neither route
// shares code with the library (which goes through erfc).
long double ld_normal_tail(long double x) {
  if (x < 0.0L) return 1.0L - ld_normal_tail(-x);
  const long double phi = std::exp(-0.5L * x * x) / std::sqrt(2.0L * kPiL);
  if (x < 3.0L) {
    long double term = x, series = x;
    for (int k = 1; k < 500; ++k) {
      term *= x * x / (2.0L * k + 1.0L);
      const long double next = series + term;
      if (next == series) break;
      series = next;
    }
    return 0.5L - phi * series;
  }
  long double cf = 0.0L;
  for (int k = 300; k >= 1; --k) cf = static_cast<long double>(k) / (x + cf);
  return phi / (x + cf);
}

}  // namespace

TEST_CASE("log_binom_pmf matches direct counting on tiny cases") {
  CHECK(std::exp(extdeg::log_binom_pmf({4, 0.5}, 2)) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(std::exp(extdeg::log_binom_pmf({1, 0.3}, 1)) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(std::exp(extdeg::log_binom_pmf({1, 0.3}, 0)) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("log_binom_pmf reaches 1e-12 relative accuracy at n=1000") {
  const long double oracle = ld_log_choose(1000, 500) + 1000.0L * std::log(0.5L);
  const double got = extdeg::log_binom_pmf({1000, 0.5}, 500);
  CHECK(std::fabs(static_cast<double>(static_cast<long double>(got) - oracle)) < 1e-12);
}

// Quad-precision oracle for log pmf at p = 1/4. Both 1/4 and 3/4 are dyadic,
// so every factor of the product C(n,k) p^k q^{n-k} is exact except one
// division per step; dyadic renormalization keeps the running product in
// range without losing a bit. Good to ~1e-25, far past the 1e-12 target.
long double quad_log_binom_pmf_quarter(std::int64_t n, std::int64_t k) {
  __float128 running = 1.0;
  std::int64_t exp2 = 0;
  const __float128 q1 = 0.75, q2 = 0.5625, q4 = 0.31640625;
  std::int64_t q_applied = 0;
  for (std::int64_t i = 1; i <= k; ++i) {
    running *= static_cast<__float128>(n - k + i) * 0.25 / static_cast<__float128>(i);
    std::int64_t q_target = (n - k) * i / k;  // prorate the q powers
    while (q_target - q_applied >= 4) { running *= q4; q_applied += 4; }
    while (q_target - q_applied >= 2) { running *= q2; q_applied += 2; }
    while (q_target - q_applied >= 1) { running *= q1; q_applied += 1; }
    while (running > 1e30) { running *= 0x1.0p-128; exp2 += 128; }
    while (running < 1e-30) { running *= 0x1.0p+128; exp2 -= 128; }
  }
  while (q_applied < n - k) { running *= q1; ++q_applied; }
  return std::log(static_cast<long double>(running)) +
         static_cast<long double>(exp2) * 0.69314718055994530941723212145818L;
}

TEST_CASE("log_binom_pmf keeps 1e-12 pmf-relative accuracy for n = 1e8") {
  // relative error of the pmf equals the absolute error of its log; the
  // check runs where the pmf is representable (|log pmf| <= ~700)
  const std::int64_t n = 100000000;
  const double p = 0.25;
  const std::int64_t np = n / 4;
  const std::int64_t sigma = 4330;  // ~sqrt(n p q)
  for (const std::int64_t k : {np, np + 3 * sigma, np + 30 * sigma}) {
    const long double oracle = quad_log_binom_pmf_quarter(n, k);
    const double got = extdeg::log_binom_pmf({n, p}, k);
    CHECK(std::fabs(static_cast<double>(static_cast<long double>(got) - oracle)) < 1e-12);
  }
}

TEST_CASE("log_binom_pmf rejects out-of-range k") {
  CHECK_THROWS_AS((void)extdeg::log_binom_pmf({10, 0.5}, -1), std::domain_error);
  CHECK_THROWS_AS((void)extdeg::log_binom_pmf({10, 0.5}, 11), std::domain_error);
  CHECK_THROWS_AS((void)extdeg::log_binom_pmf({10, 0.0}, 1), std::domain_error);
}

TEST_CASE("binom_tail handles trivial thresholds") {
  CHECK(extdeg::binom_tail({{2, 0.5}, 1.5}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(extdeg::binom_tail({{2, 0.5}, -1.0}) == 1.0);
  CHECK(extdeg::binom_tail({{2, 0.5}, 2.0}) == 0.0);
  CHECK(extdeg::binom_tail({{2, 0.5}, 5.0}) == 0.0);
  // integer threshold is strict: {B > 1} = {B = 2}
  CHECK(extdeg::binom_tail({{2, 0.5}, 1.0}) == doctest::Approx(0.25).epsilon(1e-14));
  // trials = 0: all mass at 0
  CHECK(extdeg::binom_tail({{0, 0.5}, -0.5}) == 1.0);
  CHECK(extdeg::binom_tail({{0, 0.5}, 0.0}) == 0.0);
}

TEST_CASE("binom_tail matches the summation oracle at n=60") {
  const long double oracle = ld_binom_tail(60, 0.3L, 25.5L);
  CHECK(std::fabs(extdeg::binom_tail({{60, 0.3}, 25.5}) -
                  static_cast<double>(oracle)) < 1e-13);
}

TEST_CASE("binom_tail agrees with the oracle and is monotone over the full small grid") {
  for (std::int64_t n = 1; n <= 60; ++n) {
    for (int pi = 1; pi <= 9; ++pi) {
      const double p = pi / 10.0;
      double previous = 2.0;
      for (double y = -0.5; y <= static_cast<double>(n) + 0.5; y += 1.0) {
        const double tail = extdeg::binom_tail({{n, p}, y});
        const double oracle =
            static_cast<double>(ld_binom_tail(n, static_cast<long double>(p), y));
        REQUIRE(std::fabs(tail - oracle) < 1e-13);
        REQUIRE(tail <= previous + 1e-15);  // nonincreasing in the threshold
        previous = tail;
      }
    }
  }
}

TEST_CASE("direct and incomplete-beta tail routes agree across the switchover") {
  for (const std::int64_t n : {2000, 10000, 20000}) {
    for (const double p : {0.2, 0.5, 0.8}) {
      const double sigma = std::sqrt(n * p * (1.0 - p));
      for (double z = -3.0; z <= 6.0; z += 1.5) {
        const std::int64_t kmin = static_cast<std::int64_t>(n * p + z * sigma);
        if (kmin < 1 || kmin > n) continue;
        const double direct = extdeg::detail::binom_tail_direct({n, p}, kmin);
        const double beta = extdeg::detail::binom_tail_beta({n, p}, kmin);
        REQUIRE(std::fabs(direct - beta) < 1e-13);
        REQUIRE(std::fabs(direct - beta) < 1e-12 * std::max(direct, 1e-30));
      }
    }
  }
}

TEST_CASE("tail scales to n = 1e8 through the continued-fraction route") {
  const BinomialSpec spec{100000000, 0.5};
  const double mean = 5e7, sigma = 5000.0;
  const double be = extdeg::berry_esseen_bound(spec);  // 4.1e-5 at this n
  double previous = 1.0;
  for (double z = 0.0; z <= 8.0; z += 1.0) {
    const double tail = extdeg::binom_tail(spec, mean + z * sigma);
    REQUIRE(tail > 0.0);
    REQUIRE(tail < previous);
    REQUIRE(std::fabs(tail - extdeg::normal_tail(z)) <= be);
    previous = tail;
  }
}

TEST_CASE("normal_cdf and normal_tail are complementary to 1e-15") {
  for (double x = -38.0; x <= 38.0; x += 0.5)
    CHECK(std::fabs(extdeg::normal_cdf(x) + extdeg::normal_tail(x) - 1.0) <= 1e-15);
  CHECK(extdeg::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(extdeg::normal_tail(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normal_tail matches the high-precision oracle") {
  for (const double x : {0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 30.0, 37.0}) {
    const long double oracle = ld_normal_tail(static_cast<long double>(x));
    const double got = extdeg::normal_tail(x);
    // the CF oracle converges slowly near x = 3; past x = 5 both routes are
    // sharp and the comparison runs at full double precision
    const double tol = x >= 5.0 ? 2e-15 : 1e-13;
    CHECK(std::fabs(static_cast<double>((static_cast<long double>(got) - oracle) /
                                        oracle)) < tol);
  }
  // monotone decay and positivity at the representable edge
  double previous = 1.0;
  for (double x = 0.0; x <= 38.0; x += 1.0) {
    const double tail = extdeg::normal_tail(x);
    CHECK(tail < previous);
    CHECK(tail > 0.0);
    previous = tail;
  }
}

TEST_CASE("mills_tail_approx brackets the true tail from above as x grows") {
  CHECK(extdeg::mills_tail_approx(2.0) > 0.0);
  CHECK(std::isfinite(extdeg::mills_tail_approx(2.0)));
  const double ratio10 = extdeg::mills_tail_approx(10.0) / extdeg::normal_tail(10.0);
  CHECK(ratio10 > 1.0);
  CHECK(ratio10 < 1.01);
  // x = 40 underflows double; compare in log space against the oracle
  const long double tail40 = ld_normal_tail(40.0L);
  const long double mills40 = std::exp(static_cast<long double>(extdeg::log_mills_tail(40.0)));
  CHECK(std::fabs(static_cast<double>(mills40 / tail40 - 1.0L)) < 1e-3);
  CHECK_THROWS_AS((void)extdeg::mills_tail_approx(0.0), std::domain_error);
  CHECK_THROWS_AS((void)extdeg::mills_tail_approx(-3.0), std::domain_error);
}

TEST_CASE("local_clt_pmf converges to the exact pmf near the mode") {
  auto max_deviation = [](std::int64_t n) {
    const BinomialSpec spec{n, 0.5};
    const double sigma = std::sqrt(n * 0.25);
    double worst = 0.0;
    for (double z = 0.0; z <= 3.0; z += 0.5) {
      const std::int64_t k = static_cast<std::int64_t>(n * 0.5 + z * sigma);
      const double ratio =
          extdeg::local_clt_pmf(spec, k) / std::exp(extdeg::log_binom_pmf(spec, k));
      worst = std::max(worst, std::fabs(ratio - 1.0));
    }
    return worst;
  };
  const double d2 = max_deviation(100);
  const double d4 = max_deviation(10000);
  const double d6 = max_deviation(1000000);
  CHECK(d2 < 0.05);
  CHECK(d4 < d2);
  CHECK(d6 < d4);
  CHECK(d6 < 1e-3);
  CHECK(extdeg::local_clt_pmf({4, 0.5}, 2) > 0.0);
  // spec-level check from the statement of the approximation
  const double ratio_mid = extdeg::local_clt_pmf({1000000, 0.5}, 500000) /
                           std::exp(extdeg::log_binom_pmf({1000000, 0.5}, 500000));
  CHECK(std::fabs(ratio_mid - 1.0) < 1e-3);
}

TEST_CASE("uspensky_local bound holds against the exact pmf") {
  // symmetric case: cubic correction vanishes, approx = (2 pi npq)^{-1/2}
  const auto sym = extdeg::uspensky_local({400, 0.5}, 0.0);
  CHECK(sym.approx == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * 100.0)).epsilon(1e-14));
  const double exact400 = std::exp(extdeg::log_binom_pmf({400, 0.5}, 200));
  CHECK(std::fabs(exact400 - sym.approx) < sym.delta_bound);

  for (const std::int64_t n : {100, 400, 1000, 10000}) {
    for (const double p : {0.3, 0.5, 0.7}) {
      if (n * p * (1.0 - p) < 25.0) continue;
      const double sigma = std::sqrt(n * p * (1.0 - p));
      for (double w0 = -3.0; w0 <= 3.0; w0 += 1.0) {
        const std::int64_t k =
            static_cast<std::int64_t>(std::nearbyint(n * p + w0 * sigma));
        if (k < 0 || k > n) continue;
        const double w = (static_cast<double>(k) - n * p) / sigma;
        const auto r = extdeg::uspensky_local({n, p}, w);
        const double exact = std::exp(extdeg::log_binom_pmf({n, p}, k));
        REQUIRE(std::fabs(exact - r.approx) < r.delta_bound);
      }
    }
  }
  CHECK_THROWS_AS((void)extdeg::uspensky_local({100, 0.3}, 0.0), std::domain_error);
}

TEST_CASE("berry_esseen_bound uses the Esseen constant") {
  const long double c_oracle =
      (std::sqrt(10.0L) + 3.0L) / (6.0L * std::sqrt(2.0L * kPiL));
  CHECK(std::fabs(extdeg::berry_esseen_constant() -
                  static_cast<double>(c_oracle)) < 1e-15);
  CHECK(extdeg::berry_esseen_constant() == doctest::Approx(0.4097).epsilon(5e-4));
  // p = 1/2 collapses the factor (p^2+q^2)/sqrt(pq) to 1
  CHECK(extdeg::berry_esseen_bound({16, 0.5}) ==
        doctest::Approx(extdeg::berry_esseen_constant() / 4.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)extdeg::berry_esseen_bound({1, 0.5}), std::domain_error);
}

TEST_CASE("berry_esseen inequality holds on the verification grid") {
  for (const std::int64_t n : {2, 10, 100, 10000}) {
    for (const double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const BinomialSpec spec{n, p};
      const double bound = extdeg::berry_esseen_bound(spec);
      const double sigma = std::sqrt(n * p * (1.0 - p));
      for (double w = -5.0; w <= 5.0; w += 0.5) {
        const double exact = extdeg::binom_tail(spec, n * p + w * sigma);
        REQUIRE(std::fabs(exact - extdeg::normal_tail(w)) <= bound);
      }
    }
  }
}
