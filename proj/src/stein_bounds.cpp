#include "extdeg/stein_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "extdeg/binom_numerics.hpp"

namespace extdeg {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727417803297;
constexpr double kPi1Underflow = 1e-300;

[[noreturn]] void fail(const char* what) { throw std::domain_error(what); }

double log_phi(double x) { return -0.5 * x * x - kHalfLog2Pi; }

}  // namespace

void ModelParams::validate() const {
  if (n < 3) fail("ModelParams: n must be >= 3");
  if (!(p > 0.0 && p < 1.0)) fail("ModelParams: p must lie in (0,1)");
  if (m < 1 || static_cast<std::int64_t>(m) > n) fail("ModelParams: m must lie in 1..n");
  if (!std::isfinite(t)) fail("ModelParams: t must be finite");
}

std::pair<double, double> normalization(std::int64_t n) {
  if (n < 3) fail("normalization: requires n >= 3");
  const double log_n = std::log(static_cast<double>(n));
  const double two_log_n = 2.0 * log_n;
  const double a = 1.0 / std::sqrt(two_log_n);
  const double b = std::sqrt(two_log_n) -
                   0.5 * a * (std::log(log_n) + std::log(4.0 * 3.14159265358979323846));
  return {a, b};
}

ThresholdSet thresholds(const ModelParams& params) {
  params.validate();
  const auto [a, b] = normalization(params.n);
  ThresholdSet s;
  s.a_n = a;
  s.b_n = b;
  s.x_n = a * params.t + b;
  const double nm1 = static_cast<double>(params.n - 1);
  s.y = nm1 * params.p + s.x_n * std::sqrt(nm1 * params.p * (1.0 - params.p));
  return s;
}

double pi1(const ModelParams& params) {
  const ThresholdSet s = thresholds(params);
  return binom_tail(BinomialSpec{params.n - 1, params.p}, s.y);
}

double cov_exact(std::int64_t n, double p, double y) {
  if (n < 3) fail("cov_exact: requires n >= 3");
  const BinomialSpec b2{n - 2, p};
  const double diff = binom_tail(b2, y - 1.0) - binom_tail(b2, y);
  return p * (1.0 - p) * diff * diff;
}

double cov_asymptotic(const ModelParams& params) {
  params.validate();
  const double n = static_cast<double>(params.n);
  return 2.0 * std::exp(-2.0 * params.t) * std::log(n) / (n * n * n);
}

double utvd_exact_at(std::int64_t n, double p, double y) {
  if (n < 3) fail("utvd_exact_at: requires n >= 3");
  const double pi = binom_tail(BinomialSpec{n - 1, p}, y);
  if (pi < kPi1Underflow) return 0.0;
  const double lambda = static_cast<double>(n) * pi;
  const double cov = cov_exact(n, p, y);
  const double pair_count = static_cast<double>(n) * static_cast<double>(n - 1);
  return -std::expm1(-lambda) * (pi + pair_count * cov / lambda);
}

double utvd_exact(const ModelParams& params) {
  const ThresholdSet s = thresholds(params);
  return utvd_exact_at(params.n, params.p, s.y);
}

double utvd_asymptotic(const ModelParams& params) {
  params.validate();
  const double n = static_cast<double>(params.n);
  const double rate = std::exp(-params.t);
  return (1.0 + 2.0 * std::log(n)) / n * rate * (-std::expm1(-rate));
}

double poisson_pmf(double lambda, std::int64_t k) {
  if (!(lambda >= 0.0)) fail("poisson_pmf: requires lambda >= 0");
  if (k < 0) fail("poisson_pmf: requires k >= 0");
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  if (k == 0) return std::exp(-lambda);
  return std::exp(static_cast<double>(k) * std::log(lambda) - lambda -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

double poisson_tail(double lambda, std::int64_t kmax) {
  if (!(lambda >= 0.0)) fail("poisson_tail: requires lambda >= 0");
  if (kmax < 0) return 1.0;
  if (lambda == 0.0) return 0.0;
  if (std::isinf(lambda)) return 1.0;
  double k = static_cast<double>(kmax) + 1.0;
  double term = poisson_pmf(lambda, kmax + 1);
  double sum = 0.0;
  for (int i = 0; i < 10000000; ++i) {
    sum += term;
    k += 1.0;
    term *= lambda / k;
    if (k > lambda && term < sum * 1e-18) break;
  }
  return sum < 1.0 ? sum : 1.0;
}

double poisson_cdf(double lambda, std::int64_t kmax) {
  if (!(lambda >= 0.0)) fail("poisson_cdf: requires lambda >= 0");
  if (kmax < 0) return 0.0;
  if (lambda == 0.0) return 1.0;
  if (std::isinf(lambda)) return 0.0;
  if (static_cast<double>(kmax) >= lambda) {
    return 1.0 - poisson_tail(lambda, kmax);
  }
  // below the mean the CDF is the small side; sum it directly
  double term = std::exp(-lambda);
  double sum = term;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    term *= lambda / static_cast<double>(k);
    sum += term;
  }
  return sum < 1.0 ? sum : 1.0;
}

double limit_cdf(int m, double t) {
  if (m < 1) fail("limit_cdf: requires m >= 1");
  const double lambda = std::exp(-t);
  if (std::isinf(lambda)) return 0.0;
  return poisson_cdf(lambda, m - 1);
}

double cramer_threshold(std::int64_t n, double c) {
  if (n < 3) fail("cramer_threshold: requires n >= 3");
  if (!(c > 0.0)) fail("cramer_threshold: requires c > 0");
  const double log_n = std::log(static_cast<double>(n));
  const double log_c = std::log(c);
  // g(x) = log(n phi(x)/x) - log c, strictly decreasing on x > 0
  const auto g = [&](double x) { return log_n + log_phi(x) - std::log(x) - log_c; };
  if (g(1.0) < 0.0) fail("cramer_threshold: no root with x >= 1 (c too large)");

  double lo = 1.0;
  double hi = std::max(2.0, std::sqrt(std::max(2.0 * (log_n - log_c), 1.0)) + 2.0);
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) fail("cramer_threshold: bracketing failed");
  }

  double x = std::sqrt(std::max(2.0 * (log_n - log_c), 1.0));
  if (x < lo || x > hi) x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gx = g(x);
    if (std::fabs(gx) < 1e-14) break;
    if (gx > 0.0) lo = x; else hi = x;
    const double step = gx / (x + 1.0 / x);  // Newton: g'(x) = -(x + 1/x)
    double next = x + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect safeguard
    if (next == x) break;
    x = next;
  }
  return x;
}

std::pair<double, double> moment_bounds(std::int64_t n, double p, int r, double K) {
  if (n < 2) fail("moment_bounds: requires n >= 2");
  if (!(p > 0.0 && p < 1.0)) fail("moment_bounds: p must lie in (0,1)");
  if (r < 1 || static_cast<std::int64_t>(r) > n - 1)
    fail("moment_bounds: requires 1 <= r <= n-1");

  // {B >= K} as the strict event {B > ceil(K) - 1/2}
  const auto tail_geq = [&](double cut) {
    return binom_tail(BinomialSpec{n - static_cast<std::int64_t>(r), p},
                      std::ceil(cut) - 0.5);
  };
  double choose = 1.0;
  for (int i = 0; i < r; ++i)
    choose *= static_cast<double>(n - i) / static_cast<double>(i + 1);

  const double lower = choose * std::pow(tail_geq(K), r);
  const double upper = choose * std::pow(tail_geq(K - static_cast<double>(r) - 1.0), r);
  return {lower, upper};
}

BoundReport bound_report(const ModelParams& params) {
  const ThresholdSet s = thresholds(params);
  BoundReport r;
  r.a_n = s.a_n;
  r.b_n = s.b_n;
  r.x_n = s.x_n;
  r.y = s.y;
  r.pi1 = binom_tail(BinomialSpec{params.n - 1, params.p}, s.y);
  r.lambda = static_cast<double>(params.n) * r.pi1;
  r.cov_exact = cov_exact(params.n, params.p, s.y);
  r.cov_asym = cov_asymptotic(params);
  r.utvd_asym = utvd_asymptotic(params);
  r.low_npq = static_cast<double>(params.n) * params.p * (1.0 - params.p) < 25.0;
  if (r.pi1 < kPi1Underflow) {
    r.degenerate = true;
    r.utvd_exact = 0.0;
  } else {
    const double pair_count =
        static_cast<double>(params.n) * static_cast<double>(params.n - 1);
    r.utvd_exact =
        -std::expm1(-r.lambda) * (r.pi1 + pair_count * r.cov_exact / r.lambda);
  }
  return r;
}

}  // namespace extdeg
